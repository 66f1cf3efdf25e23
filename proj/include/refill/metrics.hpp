#pragma once

// Ranking metrics and agreement statistics: nDCG@k, system rankings,
// Kendall's tau-b, Cohen's kappa (binary and graded), and rank distance.
//
// All operations are pure functions over immutable inputs. Per-query values
// accumulate in ascending query_id order so means are bitwise stable.

#include <map>
#include <string>
#include <vector>

#include "refill/collection.hpp"

namespace refill {

enum class GainFunction { linear, exponential };

struct NdcgResult {
  std::map<std::string, double> per_query;
  double mean = 0.0;  // over all queries present in the pool
};

/// DCG = sum g(grade_i)/log2(i+1) over the top k, unjudged documents scored
/// as grade 0; ideal DCG from the pool's judged grades for the query sorted
/// descending; nDCG defined as 0 when the ideal DCG is 0. Queries the run did
/// not answer score 0 and stay in the mean.
NdcgResult ndcg_at_k(const SystemRun& run, const JudgmentSet& pool, int k, GainFunction gain);

struct SystemRanking {
  std::vector<std::pair<std::string, double>> entries;  // scores non-increasing
  std::string metric_id;
  std::string tie_policy;  // "system_id_asc"

  std::size_t size() const { return entries.size(); }
  /// 1-based position under the tie policy; throws Errc::unknown_system.
  int position(const std::string& system_id) const;
  std::vector<std::string> systems() const;
};

/// Systems sorted by mean nDCG@k descending; score ties break by ascending
/// system_id.
SystemRanking rank_systems(const RunSet& runs, const JudgmentSet& pool, int k,
                           GainFunction gain);

/// Tau-b over the score-induced orderings:
/// (C - D) / sqrt((C + D + Ta)(C + D + Tb)) with Ta/Tb the pairs tied on one
/// side only. Both rankings must cover the same system set.
double kendall_tau(const SystemRanking& a, const SystemRanking& b);

enum class KappaMode { binary, graded };

/// Chance-corrected agreement between two label maps over the same key set.
/// Binary mode maps grade >= threshold to relevant; graded mode uses the five
/// grade categories unweighted. Defined as 1.0 in the degenerate all-agree
/// case where expected agreement is 1.
double cohen_kappa(const std::map<PairKey, int>& a, const std::map<PairKey, int>& b,
                   KappaMode mode, int threshold);

/// |position_a - position_b| for one system, positions 1-based.
int rank_distance(const std::string& system_id, const SystemRanking& a,
                  const SystemRanking& b);

/// Tau restricted to the reference ranking's top-K systems, for each K.
std::map<int, double> kendall_at_k_curve(const SystemRanking& reference,
                                         const SystemRanking& candidate,
                                         const std::vector<int>& k_values);

}  // namespace refill
