#include "refill/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "refill/errors.hpp"

namespace refill {

namespace {

double gain_value(int grade, GainFunction gain) {
  return gain == GainFunction::linear ? static_cast<double>(grade)
                                      : std::exp2(static_cast<double>(grade)) - 1.0;
}

void check_same_systems(const SystemRanking& a, const SystemRanking& b) {
  if (a.size() != b.size()) raise(Errc::system_set_mismatch, "rankings differ in size");
  std::vector<std::string> sa = a.systems();
  std::vector<std::string> sb = b.systems();
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) raise(Errc::system_set_mismatch, "rankings cover different systems");
}

double tau_b(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  long long concordant = 0, discordant = 0, ties_only_x = 0, ties_only_y = 0;
  bool any_pair = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      any_pair = true;
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      const int sx = (dx > 0) - (dx < 0);
      const int sy = (dy > 0) - (dy < 0);
      if (sx == 0 && sy == 0) continue;  // tied on both sides: drops out
      if (sx == 0) { ++ties_only_x; continue; }
      if (sy == 0) { ++ties_only_y; continue; }
      if (sx == sy) ++concordant; else ++discordant;
    }
  }
  if (!any_pair) return 1.0;  // a single system orders identically everywhere
  const double fx = static_cast<double>(concordant + discordant + ties_only_x);
  const double fy = static_cast<double>(concordant + discordant + ties_only_y);
  const double denom = std::sqrt(fx * fy);
  if (denom == 0.0) {
    // One side is fully tied; identical degenerate orderings correlate
    // perfectly, anything else carries no order information.
    return (concordant + discordant + ties_only_x + ties_only_y) == 0 ? 1.0 : 0.0;
  }
  return static_cast<double>(concordant - discordant) / denom;
}

}  // namespace

NdcgResult ndcg_at_k(const SystemRun& run, const JudgmentSet& pool, int k, GainFunction gain) {
  if (k < 1) raise(Errc::invalid_argument, "k must be positive");
  std::map<std::string, std::vector<int>> grades_by_query;
  for (const auto& [key, judgment] : pool.labels) {
    grades_by_query[key.first].push_back(judgment.grade);
  }
  NdcgResult out;
  double sum = 0.0;
  for (auto& [query_id, grades] : grades_by_query) {
    std::sort(grades.begin(), grades.end(), std::greater<int>());
    double ideal = 0.0;
    const std::size_t ideal_take = std::min<std::size_t>(grades.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < ideal_take; ++i) {
      ideal += gain_value(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    double dcg = 0.0;
    if (auto it = run.rankings.find(query_id); it != run.rankings.end()) {
      const auto& docs = it->second;
      const std::size_t take = std::min<std::size_t>(docs.size(), static_cast<std::size_t>(k));
      for (std::size_t i = 0; i < take; ++i) {
        if (const auto grade = pool.grade(query_id, docs[i])) {
          dcg += gain_value(*grade, gain) / std::log2(static_cast<double>(i) + 2.0);
        }
      }
    }
    const double value = ideal > 0.0 ? dcg / ideal : 0.0;
    out.per_query.emplace(query_id, value);
    sum += value;
  }
  out.mean = out.per_query.empty() ? 0.0 : sum / static_cast<double>(out.per_query.size());
  return out;
}

int SystemRanking::position(const std::string& system_id) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first == system_id) return static_cast<int>(i) + 1;
  }
  raise(Errc::unknown_system, system_id);
}

std::vector<std::string> SystemRanking::systems() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& [system_id, score] : entries) out.push_back(system_id);
  return out;
}

SystemRanking rank_systems(const RunSet& runs, const JudgmentSet& pool, int k,
                           GainFunction gain) {
  if (runs.empty()) raise(Errc::empty_input, "no runs to rank");
  SystemRanking ranking;
  ranking.metric_id = "ndcg@" + std::to_string(k);
  ranking.tie_policy = "system_id_asc";
  for (const auto& [system_id, run] : runs) {
    ranking.entries.emplace_back(system_id, ndcg_at_k(run, pool, k, gain).mean);
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return ranking;
}

double kendall_tau(const SystemRanking& a, const SystemRanking& b) {
  check_same_systems(a, b);
  std::map<std::string, double> score_b;
  for (const auto& [system_id, score] : b.entries) score_b.emplace(system_id, score);
  std::vector<double> xs, ys;
  xs.reserve(a.size());
  ys.reserve(a.size());
  for (const auto& [system_id, score] : a.entries) {
    xs.push_back(score);
    ys.push_back(score_b.at(system_id));
  }
  return tau_b(xs, ys);
}

double cohen_kappa(const std::map<PairKey, int>& a, const std::map<PairKey, int>& b,
                   KappaMode mode, int threshold) {
  if (a.empty() || b.empty()) raise(Errc::empty_input, "kappa over empty label maps");
  if (a.size() != b.size()) raise(Errc::key_set_mismatch, "label maps differ in size");
  const int n_categories = mode == KappaMode::binary ? 2 : kMaxGrade - kMinGrade + 1;
  const auto category = [&](int grade) {
    if (mode == KappaMode::binary) return grade >= threshold ? 1 : 0;
    if (grade < kMinGrade || grade > kMaxGrade) {
      raise(Errc::grade_out_of_range, std::to_string(grade));
    }
    return grade - kMinGrade;
  };
  std::vector<long long> count_a(n_categories, 0), count_b(n_categories, 0);
  long long agree = 0;
  for (const auto& [key, grade_a] : a) {
    const auto it = b.find(key);
    if (it == b.end()) raise(Errc::key_set_mismatch, key.first + ", " + key.second);
    const int ca = category(grade_a);
    const int cb = category(it->second);
    ++count_a[ca];
    ++count_b[cb];
    if (ca == cb) ++agree;
  }
  const double n = static_cast<double>(a.size());
  const double observed = static_cast<double>(agree) / n;
  double expected = 0.0;
  for (int c = 0; c < n_categories; ++c) {
    expected += (static_cast<double>(count_a[c]) / n) * (static_cast<double>(count_b[c]) / n);
  }
  if (expected >= 1.0) return 1.0;  // all mass on one shared category
  return (observed - expected) / (1.0 - expected);
}

int rank_distance(const std::string& system_id, const SystemRanking& a,
                  const SystemRanking& b) {
  return std::abs(a.position(system_id) - b.position(system_id));
}

std::map<int, double> kendall_at_k_curve(const SystemRanking& reference,
                                         const SystemRanking& candidate,
                                         const std::vector<int>& k_values) {
  check_same_systems(reference, candidate);
  std::map<std::string, double> candidate_scores;
  for (const auto& [system_id, score] : candidate.entries) {
    candidate_scores.emplace(system_id, score);
  }
  std::map<int, double> out;
  for (int k : k_values) {
    if (k < 1 || static_cast<std::size_t>(k) > reference.size()) {
      raise(Errc::invalid_argument, "K=" + std::to_string(k) + " out of range");
    }
    std::vector<double> xs, ys;
    xs.reserve(static_cast<std::size_t>(k));
    ys.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const auto& [system_id, score] = reference.entries[static_cast<std::size_t>(i)];
      xs.push_back(score);
      ys.push_back(candidate_scores.at(system_id));
    }
    out[k] = tau_b(xs, ys);
  }
  return out;
}

}  // namespace refill
