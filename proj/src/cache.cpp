#include "refill/cache.hpp"

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "refill/errors.hpp"

namespace refill {

namespace {

using json = nlohmann::json;

std::string key_of(const std::string& backend_id, const std::string& prompt_hash) {
  return backend_id + "\t" + prompt_hash;
}

json to_json(const AssessmentRecord& record) {
  return {{"backend_id", record.backend_id}, {"prompt_hash", record.prompt_hash},
          {"query_id", record.query_id},     {"doc_id", record.doc_id},
          {"grade", record.grade},           {"raw_output", record.raw_output},
          {"created_at", record.created_at}};
}

std::optional<AssessmentRecord> from_json_line(const std::string& line) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
  AssessmentRecord record;
  try {
    record.backend_id = obj.at("backend_id").get<std::string>();
    record.prompt_hash = obj.at("prompt_hash").get<std::string>();
    record.query_id = obj.at("query_id").get<std::string>();
    record.doc_id = obj.at("doc_id").get<std::string>();
    record.grade = obj.at("grade").get<int>();
    record.raw_output = obj.value("raw_output", std::string{});
    record.created_at = obj.value("created_at", std::string{});
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return record;
}

}  // namespace

JudgmentCache::JudgmentCache(const std::string& dir) : dir_(dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) raise(Errc::io_error, "cannot create cache dir " + dir_);
  log_path_ = (fs::path(dir_) / "records.log").string();
  index_path_ = (fs::path(dir_) / "index.tsv").string();
  replay_log();
  log_.open(log_path_, std::ios::app);
  if (!log_) raise(Errc::io_error, "cannot open cache log " + log_path_);
}

void JudgmentCache::replay_log() {
  std::ifstream in(log_path_);
  if (!in) return;  // fresh cache
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // Tolerate a torn final line from an interrupted writer.
    if (auto record = from_json_line(line)) {
      records_[key_of(record->backend_id, record->prompt_hash)] = std::move(*record);
    }
  }
}

std::optional<AssessmentRecord> JudgmentCache::lookup(const std::string& backend_id,
                                                      const std::string& prompt_hash) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(key_of(backend_id, prompt_hash));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void JudgmentCache::put(const AssessmentRecord& record) {
  std::lock_guard lock(mutex_);
  log_ << to_json(record).dump() << '\n';
  log_.flush();
  if (!log_) raise(Errc::io_error, "cache log write failed");
  records_[key_of(record.backend_id, record.prompt_hash)] = record;
}

void JudgmentCache::compact() {
  std::lock_guard lock(mutex_);
  log_.close();
  {
    std::ofstream out(log_path_, std::ios::trunc);
    if (!out) raise(Errc::io_error, "cannot rewrite cache log " + log_path_);
    for (const auto& [key, record] : records_) out << to_json(record).dump() << '\n';
  }
  write_index_locked();
  log_.open(log_path_, std::ios::app);
  if (!log_) raise(Errc::io_error, "cannot reopen cache log " + log_path_);
}

void JudgmentCache::write_index_locked() {
  std::ofstream out(index_path_, std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot write cache index " + index_path_);
  for (const auto& [key, record] : records_) {
    out << key << '\t' << record.grade << '\n';
  }
}

std::size_t JudgmentCache::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace refill
