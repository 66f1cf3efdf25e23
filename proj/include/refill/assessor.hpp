#pragma once

// The assessor pipeline: cache-first grading of single requests, hole
// filling, and full pool regeneration. Distinct pairs may be assessed
// concurrently (bounded by `jobs`); results merge in (query_id, doc_id)
// order regardless of completion order.

#include <cstdint>
#include <memory>
#include <set>

#include "refill/assessment.hpp"
#include "refill/backends.hpp"
#include "refill/cache.hpp"
#include "refill/collection.hpp"
#include "refill/pooling.hpp"
#include "refill/prompt.hpp"

namespace refill {

struct RetryPolicy {
  int max_attempts = 3;           // backend invocations on unavailability
  int backoff_initial_ms = 1000;  // doubles after each failed attempt
};

/// A configured backend plus prompt template, exemplar source, optional
/// persistent cache and retry policy.
class Assessor {
 public:
  Assessor(std::shared_ptr<Backend> backend, PromptTemplate tmpl, ExemplarSource exemplars,
           JudgmentCache* cache, std::uint64_t seed, RetryPolicy retry = {});

  /// Cache hit returns the stored record without touching the backend.
  /// Otherwise invokes the backend (with retries and, on an unparsable
  /// verdict, one re-prompt carrying an explicit answer-format instruction),
  /// persists the record, and returns it.
  AssessmentRecord assess(const AssessmentRequest& request);

  const std::string& backend_id() const { return backend_->id(); }
  std::uint64_t seed() const { return seed_; }

 private:
  std::shared_ptr<Backend> backend_;
  PromptTemplate tmpl_;
  ExemplarSource exemplars_;
  JudgmentCache* cache_;  // nullable
  std::uint64_t seed_;
  RetryPolicy retry_;
};

/// Builds assessment requests from conversations and passage texts, resolving
/// query ids to conversation turns through the depth pattern.
class RequestSource {
 public:
  RequestSource(const ConversationSet* conversations,
                const std::map<std::string, std::string>* passages, const DepthPattern* pattern);

  AssessmentRequest build(const std::string& query_id, const std::string& doc_id) const;
  std::map<PairKey, AssessmentRequest> build_for(const std::set<PairKey>& pairs) const;

 private:
  const ConversationSet* conversations_;
  const std::map<std::string, std::string>* passages_;
  const DepthPattern* pattern_;
};

struct FillResult {
  JudgmentSet pool;
  std::vector<PairKey> failed;  // pairs left unjudged after retries
  std::size_t n_assessed = 0;
};

/// P_filled: the hole pool plus assessor grades for every removed pair.
/// Requests must cover holes.removed. Human-provenance entries are never
/// touched; failures are reported, not silently dropped.
FillResult fill_holes(const JudgmentSet& hole_pool, const HoleSet& holes, Assessor& assessor,
                      const std::map<PairKey, AssessmentRequest>& requests, int jobs = 1);

/// A pool re-graded from scratch: same key set, all grades from the backend,
/// assessor provenance throughout.
FillResult regenerate_pool(const JudgmentSet& pool, Assessor& assessor,
                           const std::map<PairKey, AssessmentRequest>& requests, int jobs = 1);

}  // namespace refill
