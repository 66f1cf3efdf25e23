#pragma once

// Independent brute-force implementations used as oracles. These deliberately
// take different computation routes from the library (tie-count tau formula,
// explicit confusion matrices, exhaustive set scans) and must stay decoupled
// from the code they check.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "refill/collection.hpp"

namespace refill::testsupport {

double oracle_ndcg_query(const std::vector<std::string>& ranked_docs,
                         const std::map<std::string, int>& grades, int k, bool exponential);

double oracle_ndcg_mean(const SystemRun& run, const JudgmentSet& pool, int k, bool exponential);

/// Tau-b via the tie-count formula (C - D) / sqrt((n0 - n1)(n0 - n2)).
double oracle_tau_b(const std::vector<double>& a, const std::vector<double>& b);

/// Unweighted kappa from an explicit confusion matrix over n_categories.
double oracle_kappa(const std::vector<int>& a, const std::vector<int>& b, int n_categories);

/// Mean-nDCG ordering, score descending then system id ascending.
std::vector<std::pair<std::string, double>> oracle_rank(const RunSet& runs,
                                                        const JudgmentSet& pool, int k,
                                                        bool exponential);

std::set<PairKey> oracle_pool_union(const RunSet& runs, int k);

std::set<PairKey> oracle_unique(const RunSet& runs, const std::set<std::string>& group, int k);

/// Independent re-derivation of the mock backend's published formula.
int oracle_mock_grade(const std::string& resolved_utterance, const std::string& passage);

}  // namespace refill::testsupport
