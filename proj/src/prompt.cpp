#include "refill/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "refill/errors.hpp"
#include "refill/sha256.hpp"

namespace refill {

namespace {

void replace_all(std::string& text, const std::string& placeholder, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
}

std::string render_context(const AssessmentRequest& request, int context_turns) {
  if (request.context.empty()) return {};
  const std::size_t n = request.context.size();
  const std::size_t take =
      context_turns > 0 ? std::min(n, static_cast<std::size_t>(context_turns)) : n;
  std::string out;
  for (std::size_t i = n - take; i < n; ++i) {
    out += "User: " + request.context[i].first + "\n";
    out += "System: " + request.context[i].second + "\n";
  }
  return out;
}

constexpr const char* kZeroShotText =
    "You are assessing the relevance of a passage for a conversational search query.\n"
    "Grade the passage from 0 (not relevant) to 4 (perfectly relevant).\n"
    "\n"
    "{context}\n"
    "Query: {resolved_utterance}\n"
    "\n"
    "Passage: {passage}\n"
    "\n"
    "Respond with a single integer between 0 and 4.\n";

constexpr const char* kOneShotText =
    "You are assessing the relevance of a passage for a conversational search query.\n"
    "Grade the passage from 0 (not relevant) to 4 (perfectly relevant).\n"
    "\n"
    "Here is an example of a perfectly relevant response (grade 4):\n"
    "{exemplar_positive}\n"
    "\n"
    "{context}\n"
    "Query: {resolved_utterance}\n"
    "\n"
    "Passage: {passage}\n"
    "\n"
    "Respond with a single integer between 0 and 4.\n";

constexpr const char* kTwoShotText =
    "You are assessing the relevance of a passage for a conversational search query.\n"
    "Grade the passage from 0 (not relevant) to 4 (perfectly relevant).\n"
    "\n"
    "Here is an example of a relevant passage:\n"
    "{exemplar_positive}\n"
    "\n"
    "Here is an example of an irrelevant passage:\n"
    "{exemplar_negative}\n"
    "\n"
    "{context}\n"
    "Query: {resolved_utterance}\n"
    "\n"
    "Passage: {passage}\n"
    "\n"
    "Respond with a single integer between 0 and 4.\n";

}  // namespace

ShotCount shot_count_from_string(const std::string& name) {
  if (name == "zero") return ShotCount::zero;
  if (name == "one") return ShotCount::one;
  if (name == "two") return ShotCount::two;
  raise(Errc::config_error, "unknown shot count '" + name + "'");
}

const char* shot_count_name(ShotCount shots) {
  switch (shots) {
    case ShotCount::zero: return "zero";
    case ShotCount::one: return "one";
    case ShotCount::two: return "two";
  }
  return "zero";
}

std::string PromptTemplate::default_text(ShotCount shots) {
  switch (shots) {
    case ShotCount::zero: return kZeroShotText;
    case ShotCount::one: return kOneShotText;
    case ShotCount::two: return kTwoShotText;
  }
  return kZeroShotText;
}

ExemplarSource::ExemplarSource(const ConversationSet* conversations, const JudgmentSet* pool,
                               const std::map<std::string, std::string>* passages,
                               int relevant_threshold, const DepthPattern* pattern)
    : conversations_(conversations),
      pool_(pool),
      passages_(passages),
      relevant_threshold_(relevant_threshold),
      pattern_(pattern) {}

std::string ExemplarSource::canonical_response(const std::string& query_id) const {
  if (!conversations_ || !pattern_) {
    raise(Errc::missing_canonical_response, "no conversations configured");
  }
  const auto [conversation_id, depth] = pattern_->split(query_id);
  const auto it = conversations_->find(conversation_id);
  if (it == conversations_->end()) {
    raise(Errc::missing_canonical_response, "no conversation for " + query_id);
  }
  const Turn* turn = it->second.find_turn(depth);
  if (!turn || turn->response.empty()) {
    raise(Errc::missing_canonical_response, query_id);
  }
  return turn->response;
}

std::pair<std::string, std::string> ExemplarSource::sample_judged_pair(
    const std::string& query_id, Rng& rng) const {
  if (!pool_ || !passages_) raise(Errc::no_judged_pair, "no judged pool configured");
  // Candidates need passage text to be usable in a prompt.
  const auto collect = [this](const std::string& only_query, bool relevant,
                              std::vector<const std::string*>& out) {
    for (const auto& [key, judgment] : pool_->labels) {
      if (!only_query.empty() && key.first != only_query) continue;
      const bool is_relevant = judgment.grade >= relevant_threshold_;
      if (is_relevant != relevant) continue;
      if (auto it = passages_->find(key.second); it != passages_->end()) {
        out.push_back(&it->second);
      }
    }
  };
  const auto pick = [this, &collect, &rng](const std::string& query_id_arg,
                                           bool relevant) -> const std::string* {
    std::vector<const std::string*> candidates;
    collect(query_id_arg, relevant, candidates);
    if (candidates.empty()) collect("", relevant, candidates);  // collection-level fallback
    if (candidates.empty()) return nullptr;
    return candidates[static_cast<std::size_t>(rng.next_below(candidates.size()))];
  };
  const std::string* positive = pick(query_id, true);
  const std::string* negative = pick(query_id, false);
  if (!positive || !negative) {
    raise(Errc::no_judged_pair, "no judged exemplar pair for " + query_id);
  }
  return {*positive, *negative};
}

BuiltPrompt build_prompt(const PromptTemplate& tmpl, const AssessmentRequest& request,
                         const ExemplarSource& exemplars, std::uint64_t seed) {
  std::string text =
      tmpl.template_text.empty() ? PromptTemplate::default_text(tmpl.shots) : tmpl.template_text;

  std::string positive, negative;
  if (tmpl.shots == ShotCount::one) {
    positive = exemplars.canonical_response(request.query_id);
  } else if (tmpl.shots == ShotCount::two) {
    Rng rng(derive_seed(seed, "two_shot/" + request.query_id + "/" + request.doc_id));
    std::tie(positive, negative) = exemplars.sample_judged_pair(request.query_id, rng);
  }

  const std::string context_block =
      tmpl.include_context ? render_context(request, tmpl.context_turns) : std::string{};

  replace_all(text, "{resolved_utterance}", request.resolved_utterance);
  replace_all(text, "{context}", context_block);
  replace_all(text, "{passage}", request.passage);
  replace_all(text, "{exemplar_positive}", positive);
  replace_all(text, "{exemplar_negative}", negative);
  return {text, sha256_hex(text)};
}

int parse_grade(const std::string& raw) {
  const auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  std::size_t i = 0;
  while (i < raw.size()) {
    if (!std::isdigit(static_cast<unsigned char>(raw[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) ++j;
    const bool left_boundary = i == 0 || !is_alnum(raw[i - 1]);
    const bool right_boundary = j == raw.size() || !is_alnum(raw[j]);
    if (left_boundary && right_boundary && j - i == 1) {
      const int value = raw[i] - '0';
      if (value <= kMaxGrade) return value;
    }
    i = j;
  }
  std::string shown = raw.substr(0, 80);
  std::replace(shown.begin(), shown.end(), '\n', ' ');
  raise(Errc::unparsable_grade, "'" + shown + "'");
}

}  // namespace refill
