#pragma once

// Experiment orchestration: leave-one-model-out / leave-one-team-out sweeps,
// pool-vs-pool comparison, label agreement, train/test/validation splits,
// and per-depth breakdowns.
//
// Groups within a sweep are independent; shared state is limited to the
// assessment cache. Output assembly is deterministic by group id.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "refill/assessor.hpp"
#include "refill/collection.hpp"
#include "refill/metrics.hpp"
#include "refill/pooling.hpp"

namespace refill {

struct MetricConfig {
  int k = 5;
  GainFunction gain = GainFunction::linear;
};

struct ExperimentConfig {
  GroupMode mode = GroupMode::model;
  PoolConfig pool;
  MetricConfig metric;
  bool per_depth = false;
  std::optional<std::vector<int>> depth_filter;  // restrict the sweep to these depths
  int jobs = 1;
};

struct RunRow {
  std::string system_id;
  double unjudged = 0.0;  // Unjudged@k_eval against the hole pool
  int d_hole = 0;         // rank distance, original vs hole pool
  int d_filled = 0;       // rank distance, original vs filled pool
};

struct DepthRow {
  int depth = 0;
  double tau_hole = 0.0;
  double tau_filled = 0.0;
  double mean_d_hole = 0.0;
  double mean_d_filled = 0.0;
};

struct GroupReport {
  std::string group_id;
  std::vector<std::string> systems;
  std::size_t n_holes = 0;
  std::size_t n_failed = 0;      // pairs left unjudged after retries
  double filled_fraction = 1.0;  // < 1 flags partial backend failure
  double mean_unjudged = 0.0;
  double tau_hole = 1.0;   // tau(original, hole pool) rankings
  double tau_filled = 1.0; // tau(original, filled pool) rankings
  std::vector<RunRow> runs;
  std::vector<DepthRow> depths;  // populated when per_depth
};

/// For every held-out group: excise its unique judgments, measure
/// Unjudged@k_eval for its runs against the hole pool, fill the holes with
/// the assessor, and compare system rankings under original, hole, and
/// filled pools.
std::vector<GroupReport> run_leave_one_out(const RunSet& runs, const JudgmentSet& pool,
                                           Assessor& assessor, const RequestSource& requests,
                                           const std::map<std::string, int>& depths,
                                           const ExperimentConfig& cfg);

struct PoolComparison {
  SystemRanking ranking_a;
  SystemRanking ranking_b;
  double tau = 0.0;
  std::map<std::string, int> distance;  // per-system rank distance
};

PoolComparison compare_pools(const RunSet& runs, const JudgmentSet& pool_a,
                             const JudgmentSet& pool_b, const MetricConfig& metric);

struct AgreementReport {
  double kappa_binary = 0.0;
  double kappa_graded = 0.0;
  std::size_t n_common = 0;
  std::size_t n_only_first = 0;   // keys dropped from the first set
  std::size_t n_only_second = 0;  // keys dropped from the second set
};

/// Kappa agreement on the shared keys; non-shared keys are dropped with
/// counts reported. Throws Errc::empty_intersection when nothing overlaps.
AgreementReport agreement_report(const JudgmentSet& first, const JudgmentSet& second,
                                 int relevant_threshold);

struct SplitSpec {
  std::array<double, 3> ratios = {0.70, 0.15, 0.15};  // train, test, validation
  int relevant_threshold = 2;
  std::uint64_t rng_seed = 0;
};

struct SplitResult {
  JudgmentSet train;
  JudgmentSet test;
  JudgmentSet validation;
  std::vector<std::string> unbalanceable;  // flagged queries, excluded from the splits
};

/// Two-step split: per query, randomly drop irrelevant judgments (grade below
/// threshold) down to the relevant count, then distribute per query by
/// largest-remainder apportionment of each category, repairing so train keeps
/// at least one relevant and one irrelevant judgment per query. Queries
/// lacking either category are flagged and excluded.
SplitResult make_split(const JudgmentSet& pool, const SplitSpec& spec);

/// Judgments whose query sits at the given depth.
JudgmentSet restrict_to_depth(const JudgmentSet& pool, int depth,
                              const std::map<std::string, int>& depths);

/// Tau and mean rank distance of the held systems, recomputed with evaluation
/// restricted to the queries at each depth.
std::vector<DepthRow> depth_sweep(const RunSet& runs, const JudgmentSet& pool,
                                  const JudgmentSet& hole_pool, const JudgmentSet& filled_pool,
                                  const std::vector<std::string>& held_systems,
                                  const std::map<std::string, int>& depths,
                                  const MetricConfig& metric,
                                  const std::optional<std::vector<int>>& depth_filter);

}  // namespace refill
