#pragma once

#include <string>
#include <utility>
#include <vector>

namespace refill {

/// One grading task: the resolved utterance, the conversation so far, and
/// the passage under assessment.
struct AssessmentRequest {
  std::string query_id;
  std::string doc_id;
  std::string resolved_utterance;  // non-empty
  std::vector<std::pair<std::string, std::string>> context;  // (utterance, response), oldest first
  std::string passage;
};

/// One assessor verdict with provenance. created_at is informational only and
/// never reaches report files, which must be reproducible byte-for-byte.
struct AssessmentRecord {
  std::string query_id;
  std::string doc_id;
  int grade = 0;  // 0..4
  std::string backend_id;
  std::string prompt_hash;  // hex digest of the exact prompt text
  std::string raw_output;
  std::string created_at;  // ISO-8601 UTC
};

}  // namespace refill
