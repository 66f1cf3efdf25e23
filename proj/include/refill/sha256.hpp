#pragma once

#include <string>
#include <string_view>

namespace refill {

/// SHA-256 digest as lowercase hex. Used for prompt hashes and manifest
/// input digests.
std::string sha256_hex(std::string_view data);

/// Digest of a file's bytes. Throws Errc::io_error if unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace refill
