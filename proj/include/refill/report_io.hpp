#pragma once

// Plot-ready CSV and text serialization for reports. All floating-point
// output uses fixed 6-decimal formatting, so files are byte-stable for a
// given input.

#include <map>
#include <string>
#include <vector>

#include "refill/metrics.hpp"
#include "refill/pooling.hpp"
#include "refill/simulation.hpp"

namespace refill {

std::string format_double(double value);

/// group,query_id,depth,phi,phi_plus
std::string hole_per_query_csv(const std::vector<HoleReport>& reports,
                               const std::map<std::string, int>& depths);

/// depth,mean_phi,sd_phi,mean_phi_plus,sd_phi_plus
std::string hole_per_depth_csv(const std::map<int, DepthStats>& aggregated);

/// Header comment carries metric and tie policy; then position,system_id,score.
std::string ranking_csv(const SystemRanking& ranking);

std::string simulate_groups_csv(const std::vector<GroupReport>& reports);
/// Unjudged@k vs rank distance, one row per held-out run.
std::string simulate_runs_csv(const std::vector<GroupReport>& reports);
std::string simulate_depth_csv(const std::vector<GroupReport>& reports);
/// Depth vs mean tau / mean rank distance across groups.
std::string simulate_depth_aggregate_csv(const std::vector<GroupReport>& reports);

std::string comparison_csv(const PoolComparison& comparison);
/// K,tau
std::string kendall_curve_csv(const std::map<int, double>& curve);
std::string comparison_text(const PoolComparison& comparison, const AgreementReport& agreement);

}  // namespace refill
