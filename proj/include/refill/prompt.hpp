#pragma once

// Prompt construction for assessor backends. Exact wording is configuration:
// templates are plain text with the placeholders {resolved_utterance},
// {context}, {passage}, {exemplar_positive}, {exemplar_negative}; built-in
// defaults cover the zero/one/two-shot families.

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "refill/assessment.hpp"
#include "refill/collection.hpp"
#include "refill/rng.hpp"

namespace refill {

enum class ShotCount { zero, one, two };

ShotCount shot_count_from_string(const std::string& name);
const char* shot_count_name(ShotCount shots);

struct PromptTemplate {
  ShotCount shots = ShotCount::zero;
  bool include_context = false;
  int context_turns = 4;  // most recent turns kept when include_context is set
  std::string one_shot_source = "canonical_response";
  std::string two_shot_source = "sampled_pair";
  std::string template_text;  // empty -> default_text(shots)

  static std::string default_text(ShotCount shots);
};

/// Supplies prompt exemplars: the turn's canonical response as the positive
/// one-shot example, and a seeded (relevant, irrelevant) judged pair for
/// two-shot prompts, sampled from the query's own judgments when it has
/// both kinds, falling back to the whole collection.
class ExemplarSource {
 public:
  ExemplarSource() = default;
  ExemplarSource(const ConversationSet* conversations, const JudgmentSet* pool,
                 const std::map<std::string, std::string>* passages, int relevant_threshold,
                 const DepthPattern* pattern);

  /// Throws Errc::missing_canonical_response when the turn has none.
  std::string canonical_response(const std::string& query_id) const;

  /// (positive passage text, negative passage text); throws
  /// Errc::no_judged_pair when either side has no candidates.
  std::pair<std::string, std::string> sample_judged_pair(const std::string& query_id,
                                                         Rng& rng) const;

 private:
  const ConversationSet* conversations_ = nullptr;
  const JudgmentSet* pool_ = nullptr;
  const std::map<std::string, std::string>* passages_ = nullptr;
  int relevant_threshold_ = 2;
  const DepthPattern* pattern_ = nullptr;
};

struct BuiltPrompt {
  std::string text;
  std::string hash;  // sha256 of text
};

/// Deterministic for fixed (template, request, exemplar data, seed). Two-shot
/// exemplars draw from a stream labeled by (query_id, doc_id), so results do
/// not depend on assessment order.
BuiltPrompt build_prompt(const PromptTemplate& tmpl, const AssessmentRequest& request,
                         const ExemplarSource& exemplars, std::uint64_t seed);

/// Extracts the first standalone integer 0..4 from a backend's raw output;
/// throws Errc::unparsable_grade otherwise.
int parse_grade(const std::string& raw);

}  // namespace refill
