#pragma once

// Persistent judgment cache: an append-only record log (one JSON object per
// line) plus a compacted index that is always rebuildable from the log.
// Keyed by (backend_id, prompt_hash) only, so identical prompts sent to the
// same backend are never paid for twice and large assessment jobs resume for
// free.

#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "refill/assessment.hpp"

namespace refill {

class JudgmentCache {
 public:
  /// Opens (creating if needed) the cache directory and replays the log.
  explicit JudgmentCache(const std::string& dir);

  JudgmentCache(const JudgmentCache&) = delete;
  JudgmentCache& operator=(const JudgmentCache&) = delete;

  std::optional<AssessmentRecord> lookup(const std::string& backend_id,
                                         const std::string& prompt_hash) const;

  /// Appends to the log and updates the in-memory index; read-your-writes.
  void put(const AssessmentRecord& record);

  /// Rewrites the log keeping the latest record per key and refreshes the
  /// index file.
  void compact();

  std::size_t size() const;
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::string log_path_;
  std::string index_path_;
  mutable std::mutex mutex_;
  std::map<std::string, AssessmentRecord> records_;
  std::ofstream log_;

  void replay_log();
  void write_index_locked();
};

}  // namespace refill
