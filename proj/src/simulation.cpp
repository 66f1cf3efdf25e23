#include "refill/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "refill/errors.hpp"
#include "refill/rng.hpp"

namespace refill {

namespace {

/// Largest-remainder apportionment of n items over three ratio buckets;
/// remainder ties resolve in bucket order (train, test, validation).
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double quota = static_cast<double>(n) * ratios[i];
    counts[i] = static_cast<std::size_t>(quota);
    remainders[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&remainders](std::size_t a, std::size_t b) {
                     return remainders[a] > remainders[b];
                   });
  for (std::size_t i = 0; assigned < n; ++i) {
    ++counts[order[i % 3]];
    ++assigned;
  }
  return counts;
}

}  // namespace

std::vector<GroupReport> run_leave_one_out(const RunSet& runs, const JudgmentSet& pool,
                                           Assessor& assessor, const RequestSource& requests,
                                           const std::map<std::string, int>& depths,
                                           const ExperimentConfig& cfg) {
  const auto groups = make_groups(runs, cfg.mode);
  const SystemRanking base = rank_systems(runs, pool, cfg.metric.k, cfg.metric.gain);

  std::vector<GroupReport> reports;
  reports.reserve(groups.size());
  for (const auto& group : groups) {
    const HolePool hp = make_hole_pool(pool, runs, group.systems, cfg.pool);
    const auto group_requests = requests.build_for(hp.holes.removed);
    const FillResult fill =
        fill_holes(hp.hole_pool, hp.holes, assessor, group_requests, cfg.jobs);

    const SystemRanking under_hole =
        rank_systems(runs, hp.hole_pool, cfg.metric.k, cfg.metric.gain);
    const SystemRanking under_filled =
        rank_systems(runs, fill.pool, cfg.metric.k, cfg.metric.gain);

    GroupReport report;
    report.group_id = group.group_id;
    report.systems = group.systems;
    std::sort(report.systems.begin(), report.systems.end());
    report.n_holes = hp.holes.removed.size();
    report.n_failed = fill.failed.size();
    report.filled_fraction =
        report.n_holes == 0
            ? 1.0
            : static_cast<double>(fill.n_assessed) / static_cast<double>(report.n_holes);
    report.tau_hole = kendall_tau(base, under_hole);
    report.tau_filled = kendall_tau(base, under_filled);

    double unjudged_sum = 0.0;
    for (const auto& system_id : report.systems) {
      RunRow row;
      row.system_id = system_id;
      row.unjudged = unjudged_at_k(runs.at(system_id), hp.hole_pool, cfg.pool).mean;
      row.d_hole = rank_distance(system_id, base, under_hole);
      row.d_filled = rank_distance(system_id, base, under_filled);
      unjudged_sum += row.unjudged;
      report.runs.push_back(std::move(row));
    }
    report.mean_unjudged =
        report.runs.empty() ? 0.0 : unjudged_sum / static_cast<double>(report.runs.size());

    if (cfg.per_depth) {
      report.depths = depth_sweep(runs, pool, hp.hole_pool, fill.pool, group.systems, depths,
                                  cfg.metric, cfg.depth_filter);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

PoolComparison compare_pools(const RunSet& runs, const JudgmentSet& pool_a,
                             const JudgmentSet& pool_b, const MetricConfig& metric) {
  PoolComparison out;
  out.ranking_a = rank_systems(runs, pool_a, metric.k, metric.gain);
  out.ranking_b = rank_systems(runs, pool_b, metric.k, metric.gain);
  out.tau = kendall_tau(out.ranking_a, out.ranking_b);
  for (const auto& [system_id, run] : runs) {
    out.distance.emplace(system_id, rank_distance(system_id, out.ranking_a, out.ranking_b));
  }
  return out;
}

AgreementReport agreement_report(const JudgmentSet& first, const JudgmentSet& second,
                                 int relevant_threshold) {
  std::map<PairKey, int> a, b;
  for (const auto& [key, judgment] : first.labels) {
    if (second.labels.count(key)) a.emplace(key, judgment.grade);
  }
  for (const auto& [key, judgment] : second.labels) {
    if (first.labels.count(key)) b.emplace(key, judgment.grade);
  }
  if (a.empty()) raise(Errc::empty_intersection, "label sets share no keys");

  AgreementReport report;
  report.n_common = a.size();
  report.n_only_first = first.size() - a.size();
  report.n_only_second = second.size() - b.size();
  report.kappa_binary = cohen_kappa(a, b, KappaMode::binary, relevant_threshold);
  report.kappa_graded = cohen_kappa(a, b, KappaMode::graded, relevant_threshold);
  return report;
}

SplitResult make_split(const JudgmentSet& pool, const SplitSpec& spec) {
  double ratio_sum = 0.0;
  for (double r : spec.ratios) {
    if (r < 0.0) raise(Errc::invalid_argument, "negative split ratio");
    ratio_sum += r;
  }
  if (std::abs(ratio_sum - 1.0) > 1e-9) raise(Errc::invalid_argument, "split ratios must sum to 1");
  if (spec.relevant_threshold < kMinGrade || spec.relevant_threshold > kMaxGrade) {
    raise(Errc::invalid_argument, "relevant_threshold out of range");
  }

  std::map<std::string, std::vector<PairKey>> by_query_relevant;
  std::map<std::string, std::vector<PairKey>> by_query_irrelevant;
  std::set<std::string> queries;
  for (const auto& [key, judgment] : pool.labels) {
    queries.insert(key.first);
    if (judgment.grade >= spec.relevant_threshold) {
      by_query_relevant[key.first].push_back(key);
    } else {
      by_query_irrelevant[key.first].push_back(key);
    }
  }

  SplitResult result;
  for (const auto& query_id : queries) {
    auto rel_it = by_query_relevant.find(query_id);
    auto irr_it = by_query_irrelevant.find(query_id);
    if (rel_it == by_query_relevant.end() || irr_it == by_query_irrelevant.end()) {
      result.unbalanceable.push_back(query_id);
      continue;
    }
    std::vector<PairKey> relevant = rel_it->second;
    std::vector<PairKey> irrelevant = irr_it->second;

    // Step 1: drop random irrelevant judgments down to the relevant count;
    // never below it.
    if (irrelevant.size() > relevant.size()) {
      Rng rng(derive_seed(spec.rng_seed, "split/balance/" + query_id));
      rng.shuffle(irrelevant);
      irrelevant.resize(relevant.size());
    }

    // Step 2: apportion each category separately, then repair into train.
    JudgmentSet* buckets[3] = {&result.train, &result.test, &result.validation};
    std::array<std::vector<PairKey>, 3> assigned_relevant;
    std::array<std::vector<PairKey>, 3> assigned_irrelevant;
    const auto distribute = [&](std::vector<PairKey>& items, const char* label,
                                std::array<std::vector<PairKey>, 3>& assigned) {
      Rng rng(derive_seed(spec.rng_seed, "split/assign/" + query_id + "/" + label));
      rng.shuffle(items);
      const auto counts = apportion(items.size(), spec.ratios);
      std::size_t cursor = 0;
      for (std::size_t bucket = 0; bucket < 3; ++bucket) {
        for (std::size_t i = 0; i < counts[bucket]; ++i) {
          assigned[bucket].push_back(items[cursor++]);
        }
      }
    };
    distribute(relevant, "relevant", assigned_relevant);
    distribute(irrelevant, "irrelevant", assigned_irrelevant);

    const auto repair = [](std::array<std::vector<PairKey>, 3>& assigned) {
      if (!assigned[0].empty()) return;
      for (std::size_t from : {1UL, 2UL}) {
        if (!assigned[from].empty()) {
          assigned[0].push_back(assigned[from].back());
          assigned[from].pop_back();
          return;
        }
      }
    };
    repair(assigned_relevant);
    repair(assigned_irrelevant);

    for (std::size_t bucket = 0; bucket < 3; ++bucket) {
      for (const auto& key : assigned_relevant[bucket]) {
        buckets[bucket]->labels.emplace(key, pool.labels.at(key));
      }
      for (const auto& key : assigned_irrelevant[bucket]) {
        buckets[bucket]->labels.emplace(key, pool.labels.at(key));
      }
    }
  }
  return result;
}

JudgmentSet restrict_to_depth(const JudgmentSet& pool, int depth,
                              const std::map<std::string, int>& depths) {
  JudgmentSet out;
  for (const auto& [key, judgment] : pool.labels) {
    const auto it = depths.find(key.first);
    if (it == depths.end()) raise(Errc::missing_depth, key.first);
    if (it->second == depth) out.labels.emplace(key, judgment);
  }
  return out;
}

std::vector<DepthRow> depth_sweep(const RunSet& runs, const JudgmentSet& pool,
                                  const JudgmentSet& hole_pool, const JudgmentSet& filled_pool,
                                  const std::vector<std::string>& held_systems,
                                  const std::map<std::string, int>& depths,
                                  const MetricConfig& metric,
                                  const std::optional<std::vector<int>>& depth_filter) {
  std::set<int> wanted;
  if (depth_filter) {
    wanted.insert(depth_filter->begin(), depth_filter->end());
  } else {
    for (const auto& query_id : pool.query_ids()) {
      const auto it = depths.find(query_id);
      if (it == depths.end()) raise(Errc::missing_depth, query_id);
      wanted.insert(it->second);
    }
  }

  std::vector<DepthRow> rows;
  for (int depth : wanted) {
    const JudgmentSet pool_d = restrict_to_depth(pool, depth, depths);
    if (pool_d.labels.empty()) continue;
    const JudgmentSet hole_d = restrict_to_depth(hole_pool, depth, depths);
    const JudgmentSet filled_d = restrict_to_depth(filled_pool, depth, depths);

    const SystemRanking base = rank_systems(runs, pool_d, metric.k, metric.gain);
    const SystemRanking under_hole = rank_systems(runs, hole_d, metric.k, metric.gain);
    const SystemRanking under_filled = rank_systems(runs, filled_d, metric.k, metric.gain);

    DepthRow row;
    row.depth = depth;
    row.tau_hole = kendall_tau(base, under_hole);
    row.tau_filled = kendall_tau(base, under_filled);
    double sum_hole = 0.0, sum_filled = 0.0;
    for (const auto& system_id : held_systems) {
      sum_hole += rank_distance(system_id, base, under_hole);
      sum_filled += rank_distance(system_id, base, under_filled);
    }
    const double n = held_systems.empty() ? 1.0 : static_cast<double>(held_systems.size());
    row.mean_d_hole = sum_hole / n;
    row.mean_d_filled = sum_filled / n;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace refill
