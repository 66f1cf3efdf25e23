#include "support/oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace refill::testsupport {

namespace {

double oracle_gain(int grade, bool exponential) {
  if (!exponential) return grade;
  double value = 1.0;
  for (int i = 0; i < grade; ++i) value *= 2.0;
  return value - 1.0;
}

}  // namespace

double oracle_ndcg_query(const std::vector<std::string>& ranked_docs,
                         const std::map<std::string, int>& grades, int k, bool exponential) {
  double dcg = 0.0;
  for (int i = 0; i < k && i < static_cast<int>(ranked_docs.size()); ++i) {
    const auto it = grades.find(ranked_docs[static_cast<std::size_t>(i)]);
    const int grade = it == grades.end() ? 0 : it->second;
    dcg += oracle_gain(grade, exponential) * std::log(2.0) / std::log(static_cast<double>(i) + 2.0);
  }
  std::vector<int> sorted;
  sorted.reserve(grades.size());
  for (const auto& [doc, grade] : grades) sorted.push_back(grade);
  std::sort(sorted.rbegin(), sorted.rend());
  double ideal = 0.0;
  for (int i = 0; i < k && i < static_cast<int>(sorted.size()); ++i) {
    ideal += oracle_gain(sorted[static_cast<std::size_t>(i)], exponential) * std::log(2.0) /
             std::log(static_cast<double>(i) + 2.0);
  }
  if (ideal == 0.0) return 0.0;
  return dcg / ideal;
}

double oracle_ndcg_mean(const SystemRun& run, const JudgmentSet& pool, int k, bool exponential) {
  std::map<std::string, std::map<std::string, int>> grades_by_query;
  for (const auto& [key, judgment] : pool.labels) {
    grades_by_query[key.first][key.second] = judgment.grade;
  }
  if (grades_by_query.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [query_id, grades] : grades_by_query) {
    std::vector<std::string> docs;
    if (const auto it = run.rankings.find(query_id); it != run.rankings.end()) docs = it->second;
    sum += oracle_ndcg_query(docs, grades, k, exponential);
  }
  return sum / static_cast<double>(grades_by_query.size());
}

double oracle_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prod = (a[i] - a[j]) * (b[i] - b[j]);
      if (prod > 0) ++concordant;
      if (prod < 0) ++discordant;
    }
  }
  const auto tie_pairs = [n](const std::vector<double>& values) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    long long pairs = 0;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && sorted[j] == sorted[i]) ++j;
      const long long t = static_cast<long long>(j - i);
      pairs += t * (t - 1) / 2;
      i = j;
    }
    return pairs;
  };
  const long long n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  const long long n1 = tie_pairs(a);
  const long long n2 = tie_pairs(b);
  const double denom =
      std::sqrt(static_cast<double>(n0 - n1)) * std::sqrt(static_cast<double>(n0 - n2));
  if (denom == 0.0) return (n1 == n0 && n2 == n0) ? 1.0 : 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

double oracle_kappa(const std::vector<int>& a, const std::vector<int>& b, int n_categories) {
  std::vector<std::vector<long long>> confusion(
      static_cast<std::size_t>(n_categories),
      std::vector<long long>(static_cast<std::size_t>(n_categories), 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    confusion[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])]++;
  }
  const double n = static_cast<double>(a.size());
  double observed = 0.0;
  for (int c = 0; c < n_categories; ++c) {
    observed += static_cast<double>(confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)]);
  }
  observed /= n;
  double expected = 0.0;
  for (int c = 0; c < n_categories; ++c) {
    long long row = 0, col = 0;
    for (int o = 0; o < n_categories; ++o) {
      row += confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(o)];
      col += confusion[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)];
    }
    expected += (static_cast<double>(row) / n) * (static_cast<double>(col) / n);
  }
  if (expected >= 1.0) return 1.0;
  return (observed - expected) / (1.0 - expected);
}

std::vector<std::pair<std::string, double>> oracle_rank(const RunSet& runs,
                                                        const JudgmentSet& pool, int k,
                                                        bool exponential) {
  std::vector<std::pair<std::string, double>> entries;
  for (const auto& [system_id, run] : runs) {
    entries.emplace_back(system_id, oracle_ndcg_mean(run, pool, k, exponential));
  }
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return entries;
}

std::set<PairKey> oracle_pool_union(const RunSet& runs, int k) {
  std::set<PairKey> out;
  for (const auto& [system_id, run] : runs) {
    for (const auto& [query_id, docs] : run.rankings) {
      for (int i = 0; i < k && i < static_cast<int>(docs.size()); ++i) {
        out.insert({query_id, docs[static_cast<std::size_t>(i)]});
      }
    }
  }
  return out;
}

std::set<PairKey> oracle_unique(const RunSet& runs, const std::set<std::string>& group, int k) {
  RunSet inside, outside;
  for (const auto& [system_id, run] : runs) {
    (group.count(system_id) ? inside : outside).emplace(system_id, run);
  }
  const auto in_pairs = oracle_pool_union(inside, k);
  const auto out_pairs = oracle_pool_union(outside, k);
  std::set<PairKey> result;
  for (const auto& pair : in_pairs) {
    if (out_pairs.find(pair) == out_pairs.end()) result.insert(pair);
  }
  return result;
}

int oracle_mock_grade(const std::string& resolved_utterance, const std::string& passage) {
  const auto tokens = [](const std::string& text) {
    std::string normalized;
    for (char c : text) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        normalized.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      } else {
        normalized.push_back(' ');
      }
    }
    std::istringstream stream(normalized);
    std::set<std::string> out;
    std::string word;
    while (stream >> word) out.insert(word);
    return out;
  };
  const auto utterance_tokens = tokens(resolved_utterance);
  if (utterance_tokens.empty()) return 0;
  const auto passage_tokens = tokens(passage);
  int shared = 0;
  for (const auto& token : utterance_tokens) {
    if (passage_tokens.count(token)) ++shared;
  }
  const double recall = static_cast<double>(shared) / static_cast<double>(utterance_tokens.size());
  int grade = static_cast<int>(std::floor(5.0 * recall));
  if (grade > 4) grade = 4;
  return grade;
}

}  // namespace refill::testsupport
