#pragma once

#include <string>
#include <vector>

namespace refill {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Regular files directly under `dir`, sorted by filename.
std::vector<std::string> list_files(const std::string& dir);

}  // namespace refill
