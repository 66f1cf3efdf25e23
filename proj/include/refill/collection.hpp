#pragma once

// Parsing and serialization for retrieval runs, graded judgment files,
// conversation topic files, and the small lookup tables around them.
//
// Line formats (UTF-8; blank lines and '#'-prefixed comment lines ignored):
//   run:      query_id <ws> placeholder <ws> doc_id <ws> rank <ws> score <ws> run_tag
//   qrels:    query_id <ws> placeholder <ws> doc_id <ws> grade        (grade 0..4)
//   team map: system_id <tab> team_id
//   passages: doc_id <tab> text
// Topic files are JSON; see parse_topics.
//
// All parsers are pure over their input text and the parsed value objects are
// plain data, safe to share across threads.

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace refill {

using PairKey = std::pair<std::string, std::string>;  // (query_id, doc_id)

inline constexpr int kMinGrade = 0;
inline constexpr int kMaxGrade = 4;

struct RunRecord {
  std::string query_id;
  std::string doc_id;
  int rank = 0;  // 1-based
  double score = 0.0;
  std::string run_tag;
};

struct SystemRun {
  std::string system_id;
  std::string team_id;  // empty until map_teams assigns it
  std::map<std::string, std::vector<std::string>> rankings;  // query -> docs, best first
};

/// Runs keyed by system_id; map keeps every sweep deterministic.
using RunSet = std::map<std::string, SystemRun>;

struct Judgment {
  int grade = 0;
  std::string source;  // "human" or "assessor:<backend-id>"
};

inline const char* kHumanSource = "human";

struct JudgmentSet {
  std::map<PairKey, Judgment> labels;

  std::size_t size() const { return labels.size(); }
  bool contains(const std::string& query_id, const std::string& doc_id) const;
  std::optional<int> grade(const std::string& query_id, const std::string& doc_id) const;
  std::set<std::string> query_ids() const;
  bool all_human() const;
};

struct Turn {
  int turn_index = 0;  // 1-based depth within the conversation
  std::string utterance;
  std::string resolved_utterance;
  std::string response;  // canonical system response
};

struct Conversation {
  std::string conversation_id;
  std::string aux_text;  // optional free text carried opaquely
  std::vector<Turn> turns;  // turn_index values 1..n contiguous

  const Turn* find_turn(int turn_index) const;
};

using ConversationSet = std::map<std::string, Conversation>;

/// Extracts the conversation-turn depth from a query identifier. Patterns may
/// mark the digits with a named group `(?<depth>...)`; otherwise the first
/// capture group is used. The default pattern takes the last run of digits
/// after the final underscore or hyphen, which fits both "topic_turn" and
/// "topic-subtopic_turn" id shapes.
class DepthPattern {
 public:
  static DepthPattern compile(const std::string& pattern_text);
  static const DepthPattern& default_pattern();

  /// Depth captured from query_id; throws Errc::no_match when the pattern
  /// does not match or the capture is not a positive integer.
  int extract(const std::string& query_id) const;

  /// (conversation_id, depth): the conversation id is the text before the
  /// captured digits, with one trailing '_' or '-' separator stripped.
  std::pair<std::string, int> split(const std::string& query_id) const;

  const std::string& text() const { return text_; }

 private:
  DepthPattern() = default;
  std::string text_;
  std::regex re_;
  int group_index_ = 1;
};

// ---- run files ----

std::vector<RunRecord> parse_run_records(const std::string& text);
RunSet group_runs(const std::vector<RunRecord>& records);
RunSet parse_run(const std::string& text);

/// Canonical serialization: sorted by (run_tag, query_id, rank); scores are
/// synthesized descending since SystemRun keeps order only.
std::string write_run(const RunSet& runs);

// ---- qrels files ----

JudgmentSet parse_qrels(const std::string& text);

/// Canonical serialization: "query_id 0 doc_id grade", sorted by
/// (query_id, doc_id). Byte-stable for a given label set.
std::string write_qrels(const JudgmentSet& judgments);

/// Sidecar provenance table: "query_id<TAB>doc_id<TAB>source" in the same
/// canonical order as write_qrels.
std::string write_provenance(const JudgmentSet& judgments);
void apply_provenance(JudgmentSet& judgments, const std::string& sidecar_text);

// ---- topic files ----

/// Parses the canonical topic schema: a JSON array of
///   { "conversation_id": str, "aux_text": str?, "turns":
///     [ { "turn_index": int, "utterance": str,
///         "resolved_utterance": str, "response": str } ] }
/// Turn indices must be 1..n contiguous.
ConversationSet parse_topics(const std::string& json_text);

// ---- depth and teams ----

int extract_depth(const std::string& query_id, const DepthPattern& pattern);

/// Depth for every query id; throws Errc::no_match naming the first id the
/// pattern fails on.
std::map<std::string, int> depth_map(const std::set<std::string>& query_ids,
                                     const DepthPattern& pattern);

std::map<std::string, std::string> parse_team_map(const std::string& text);

/// Assigns team ids; every system must be covered or Errc::unmapped_system.
RunSet map_teams(RunSet runs, const std::map<std::string, std::string>& system_to_team);

// ---- passages ----

std::map<std::string, std::string> parse_passages(const std::string& text);

/// Union of ranking keys across all systems.
std::set<std::string> all_query_ids(const RunSet& runs);

}  // namespace refill
