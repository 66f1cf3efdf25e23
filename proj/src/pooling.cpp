#include "refill/pooling.hpp"

#include <cmath>

#include "refill/errors.hpp"

namespace refill {

namespace {

void add_topk(const SystemRun& run, int k, std::set<PairKey>& out) {
  for (const auto& [query_id, docs] : run.rankings) {
    const std::size_t take = std::min<std::size_t>(docs.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < take; ++i) out.emplace(query_id, docs[i]);
  }
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

// Population standard deviation; reports describe the values they aggregate,
// not a sample from a larger population.
MeanSd mean_sd(const std::vector<double>& values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

}  // namespace

std::vector<GroupSpec> make_groups(const RunSet& runs, GroupMode mode) {
  std::vector<GroupSpec> out;
  if (mode == GroupMode::model) {
    for (const auto& [system_id, run] : runs) out.push_back({system_id, {system_id}});
    return out;
  }
  std::map<std::string, std::vector<std::string>> by_team;
  for (const auto& [system_id, run] : runs) {
    if (run.team_id.empty()) {
      raise(Errc::unmapped_system, system_id + " has no team (run map_teams first)");
    }
    by_team[run.team_id].push_back(system_id);
  }
  for (auto& [team_id, systems] : by_team) out.push_back({team_id, std::move(systems)});
  return out;
}

std::set<PairKey> build_pool(const RunSet& runs, const PoolConfig& cfg) {
  if (runs.empty()) raise(Errc::empty_input, "no runs to pool");
  if (cfg.k_pool < 1) raise(Errc::invalid_argument, "k_pool must be positive");
  std::set<PairKey> out;
  for (const auto& [system_id, run] : runs) add_topk(run, cfg.k_pool, out);
  return out;
}

std::set<PairKey> unique_contributions(const RunSet& runs,
                                       const std::vector<std::string>& group_systems,
                                       const PoolConfig& cfg) {
  if (cfg.k_pool < 1) raise(Errc::invalid_argument, "k_pool must be positive");
  std::set<std::string> group(group_systems.begin(), group_systems.end());
  for (const auto& system_id : group) {
    if (!runs.count(system_id)) raise(Errc::unknown_system, system_id);
  }
  std::set<PairKey> group_pairs;
  std::set<PairKey> other_pairs;
  for (const auto& [system_id, run] : runs) {
    add_topk(run, cfg.k_pool, group.count(system_id) ? group_pairs : other_pairs);
  }
  std::set<PairKey> out;
  for (const auto& pair : group_pairs) {
    if (!other_pairs.count(pair)) out.insert(pair);
  }
  return out;
}

HolePool make_hole_pool(const JudgmentSet& pool, const RunSet& runs,
                        const std::vector<std::string>& group_systems, const PoolConfig& cfg) {
  if (!pool.all_human()) {
    raise(Errc::invalid_argument, "hole pools are excised from human-provenance judgments");
  }
  const auto unique = unique_contributions(runs, group_systems, cfg);
  HolePool out;
  for (const auto& [key, judgment] : pool.labels) {
    if (unique.count(key)) {
      out.holes.removed.insert(key);
    } else {
      out.hole_pool.labels.emplace(key, judgment);
    }
  }
  return out;
}

HoleReport hole_report(const JudgmentSet& pool, const RunSet& runs, const GroupSpec& group,
                       const PoolConfig& cfg, const std::map<std::string, int>& depths) {
  HoleReport report;
  report.group_id = group.group_id;
  for (const auto& query_id : all_query_ids(runs)) {
    if (!depths.count(query_id)) raise(Errc::missing_depth, query_id);
    report.per_query.emplace(query_id, HoleStats{});
  }
  for (const auto& [query_id, doc_id] : unique_contributions(runs, group.systems, cfg)) {
    auto& stats = report.per_query.at(query_id);
    ++stats.missing;
    // Unjudged pairs have no human grade and never count as relevant.
    if (const auto grade = pool.grade(query_id, doc_id);
        grade && *grade >= cfg.relevant_threshold) {
      ++stats.missing_relevant;
    }
  }
  std::map<int, std::vector<double>> missing_by_depth;
  std::map<int, std::vector<double>> relevant_by_depth;
  for (const auto& [query_id, stats] : report.per_query) {
    const int depth = depths.at(query_id);
    missing_by_depth[depth].push_back(stats.missing);
    relevant_by_depth[depth].push_back(stats.missing_relevant);
  }
  for (const auto& [depth, values] : missing_by_depth) {
    const auto m = mean_sd(values);
    const auto r = mean_sd(relevant_by_depth.at(depth));
    report.per_depth[depth] = {m.mean, m.sd, r.mean, r.sd};
  }
  return report;
}

std::map<int, DepthStats> aggregate_hole_reports(const std::vector<HoleReport>& reports) {
  std::map<int, std::vector<double>> missing_means;
  std::map<int, std::vector<double>> relevant_means;
  for (const auto& report : reports) {
    for (const auto& [depth, stats] : report.per_depth) {
      missing_means[depth].push_back(stats.mean_missing);
      relevant_means[depth].push_back(stats.mean_missing_relevant);
    }
  }
  std::map<int, DepthStats> out;
  for (const auto& [depth, values] : missing_means) {
    const auto m = mean_sd(values);
    const auto r = mean_sd(relevant_means.at(depth));
    out[depth] = {m.mean, m.sd, r.mean, r.sd};
  }
  return out;
}

double overall_mean_missing(const std::vector<HoleReport>& reports) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& report : reports) {
    for (const auto& [query_id, stats] : report.per_query) {
      sum += stats.missing;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

UnjudgedResult unjudged_at_k(const SystemRun& run, const JudgmentSet& pool,
                             const PoolConfig& cfg) {
  if (cfg.k_eval < 1) raise(Errc::invalid_argument, "k_eval must be positive");
  UnjudgedResult out;
  double sum = 0.0;
  for (const auto& [query_id, docs] : run.rankings) {
    if (docs.empty()) continue;
    const std::size_t take = std::min<std::size_t>(docs.size(), static_cast<std::size_t>(cfg.k_eval));
    std::size_t absent = 0;
    for (std::size_t i = 0; i < take; ++i) {
      if (!pool.contains(query_id, docs[i])) ++absent;
    }
    const double fraction = static_cast<double>(absent) / static_cast<double>(take);
    out.per_query.emplace(query_id, fraction);
    sum += fraction;
  }
  out.mean = out.per_query.empty() ? 0.0 : sum / static_cast<double>(out.per_query.size());
  return out;
}

}  // namespace refill
