#pragma once

// Top-k pools over retrieval runs: uniquely contributed documents, judgment
// excision (hole pools), and the hole statistics behind reusability reports.
//
// All operations are pure over immutable inputs; per-group computations in a
// sweep are independent and may run in parallel.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "refill/collection.hpp"

namespace refill {

struct PoolConfig {
  int k_pool = 10;             // pooling depth
  int k_eval = 10;             // depth for Unjudged@k
  int relevant_threshold = 2;  // grade >= threshold counts as relevant
};

enum class GroupMode { model, team };

struct GroupSpec {
  std::string group_id;
  std::vector<std::string> systems;
};

/// model: one group per system; team: one group per team_id (requires
/// map_teams to have run). With an identity team map the two modes produce
/// identical groups.
std::vector<GroupSpec> make_groups(const RunSet& runs, GroupMode mode);

/// Union over systems and queries of each ranking's top-k_pool documents.
std::set<PairKey> build_pool(const RunSet& runs, const PoolConfig& cfg);

/// Pairs in the top-k_pool of at least one group member and in the top-k_pool
/// of no system outside the group.
std::set<PairKey> unique_contributions(const RunSet& runs,
                                       const std::vector<std::string>& group_systems,
                                       const PoolConfig& cfg);

struct HoleSet {
  std::set<PairKey> removed;  // judged pairs excised from the original pool
};

struct HolePool {
  JudgmentSet hole_pool;  // original judgments minus the group's unique pairs
  HoleSet holes;
};

/// Excises the group's uniquely contributed judged pairs from a
/// human-provenance pool. |hole_pool| + |holes.removed| == |pool|.
HolePool make_hole_pool(const JudgmentSet& pool, const RunSet& runs,
                        const std::vector<std::string>& group_systems, const PoolConfig& cfg);

struct HoleStats {
  int missing = 0;           // uniquely contributed top-k pairs (judged or not)
  int missing_relevant = 0;  // subset with a human grade >= relevant_threshold
};

struct DepthStats {
  double mean_missing = 0.0;
  double sd_missing = 0.0;
  double mean_missing_relevant = 0.0;
  double sd_missing_relevant = 0.0;
};

struct HoleReport {
  std::string group_id;
  std::map<std::string, HoleStats> per_query;  // every query any system ran
  std::map<int, DepthStats> per_depth;         // recomputable from per_query
};

/// Hole counts for one held-out group. The query universe is the union of
/// ranking keys across all systems; every universe query needs a depth.
HoleReport hole_report(const JudgmentSet& pool, const RunSet& runs, const GroupSpec& group,
                       const PoolConfig& cfg, const std::map<std::string, int>& depths);

/// Sweep-level aggregation: each group's per-depth mean first, then mean and
/// standard deviation of those group means per depth.
std::map<int, DepthStats> aggregate_hole_reports(const std::vector<HoleReport>& reports);

/// Flat mean of per-query missing counts over all (group, query) cells.
double overall_mean_missing(const std::vector<HoleReport>& reports);

struct UnjudgedResult {
  std::map<std::string, double> per_query;  // fraction of top-k_eval absent from the pool
  double mean = 0.0;
};

/// Fraction of the run's top-k_eval documents with no judgment in the pool;
/// rankings shorter than k_eval use their actual length as denominator.
UnjudgedResult unjudged_at_k(const SystemRun& run, const JudgmentSet& pool,
                             const PoolConfig& cfg);

}  // namespace refill
