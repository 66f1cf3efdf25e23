#include "refill/report_io.hpp"

#include <cstdio>
#include <map>

namespace refill {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string hole_per_query_csv(const std::vector<HoleReport>& reports,
                               const std::map<std::string, int>& depths) {
  std::string out = "group,query_id,depth,phi,phi_plus\n";
  for (const auto& report : reports) {
    for (const auto& [query_id, stats] : report.per_query) {
      out += report.group_id + ',' + query_id + ',' + std::to_string(depths.at(query_id)) +
             ',' + std::to_string(stats.missing) + ',' + std::to_string(stats.missing_relevant) +
             '\n';
    }
  }
  return out;
}

std::string hole_per_depth_csv(const std::map<int, DepthStats>& aggregated) {
  std::string out = "depth,mean_phi,sd_phi,mean_phi_plus,sd_phi_plus\n";
  for (const auto& [depth, stats] : aggregated) {
    out += std::to_string(depth) + ',' + format_double(stats.mean_missing) + ',' +
           format_double(stats.sd_missing) + ',' + format_double(stats.mean_missing_relevant) +
           ',' + format_double(stats.sd_missing_relevant) + '\n';
  }
  return out;
}

std::string ranking_csv(const SystemRanking& ranking) {
  std::string out =
      "# metric=" + ranking.metric_id + " tie_policy=" + ranking.tie_policy + "\n";
  out += "position,system_id,score\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    out += std::to_string(i + 1) + ',' + ranking.entries[i].first + ',' +
           format_double(ranking.entries[i].second) + '\n';
  }
  return out;
}

std::string simulate_groups_csv(const std::vector<GroupReport>& reports) {
  std::string out =
      "group,n_systems,n_holes,filled_fraction,mean_unjudged_at_k,tau_hole,tau_filled,"
      "mean_d_hole,mean_d_filled\n";
  for (const auto& report : reports) {
    double d_hole = 0.0, d_filled = 0.0;
    for (const auto& row : report.runs) {
      d_hole += row.d_hole;
      d_filled += row.d_filled;
    }
    const double n = report.runs.empty() ? 1.0 : static_cast<double>(report.runs.size());
    out += report.group_id + ',' + std::to_string(report.systems.size()) + ',' +
           std::to_string(report.n_holes) + ',' + format_double(report.filled_fraction) + ',' +
           format_double(report.mean_unjudged) + ',' + format_double(report.tau_hole) + ',' +
           format_double(report.tau_filled) + ',' + format_double(d_hole / n) + ',' +
           format_double(d_filled / n) + '\n';
  }
  return out;
}

std::string simulate_runs_csv(const std::vector<GroupReport>& reports) {
  std::string out = "group,system_id,unjudged_at_k,d_hole,d_filled\n";
  for (const auto& report : reports) {
    for (const auto& row : report.runs) {
      out += report.group_id + ',' + row.system_id + ',' + format_double(row.unjudged) + ',' +
             std::to_string(row.d_hole) + ',' + std::to_string(row.d_filled) + '\n';
    }
  }
  return out;
}

std::string simulate_depth_csv(const std::vector<GroupReport>& reports) {
  std::string out = "group,depth,tau_hole,tau_filled,mean_d_hole,mean_d_filled\n";
  for (const auto& report : reports) {
    for (const auto& row : report.depths) {
      out += report.group_id + ',' + std::to_string(row.depth) + ',' +
             format_double(row.tau_hole) + ',' + format_double(row.tau_filled) + ',' +
             format_double(row.mean_d_hole) + ',' + format_double(row.mean_d_filled) + '\n';
    }
  }
  return out;
}

std::string simulate_depth_aggregate_csv(const std::vector<GroupReport>& reports) {
  std::map<int, std::vector<const DepthRow*>> by_depth;
  for (const auto& report : reports) {
    for (const auto& row : report.depths) by_depth[row.depth].push_back(&row);
  }
  std::string out = "depth,mean_tau_hole,mean_tau_filled,mean_d_hole,mean_d_filled\n";
  for (const auto& [depth, rows] : by_depth) {
    double tau_hole = 0.0, tau_filled = 0.0, d_hole = 0.0, d_filled = 0.0;
    for (const DepthRow* row : rows) {
      tau_hole += row->tau_hole;
      tau_filled += row->tau_filled;
      d_hole += row->mean_d_hole;
      d_filled += row->mean_d_filled;
    }
    const double n = static_cast<double>(rows.size());
    out += std::to_string(depth) + ',' + format_double(tau_hole / n) + ',' +
           format_double(tau_filled / n) + ',' + format_double(d_hole / n) + ',' +
           format_double(d_filled / n) + '\n';
  }
  return out;
}

std::string comparison_csv(const PoolComparison& comparison) {
  std::map<std::string, double> score_a, score_b;
  for (const auto& [system_id, score] : comparison.ranking_a.entries) score_a[system_id] = score;
  for (const auto& [system_id, score] : comparison.ranking_b.entries) score_b[system_id] = score;
  std::string out = "system_id,position_a,score_a,position_b,score_b,distance\n";
  for (const auto& [system_id, distance] : comparison.distance) {
    out += system_id + ',' + std::to_string(comparison.ranking_a.position(system_id)) + ',' +
           format_double(score_a.at(system_id)) + ',' +
           std::to_string(comparison.ranking_b.position(system_id)) + ',' +
           format_double(score_b.at(system_id)) + ',' + std::to_string(distance) + '\n';
  }
  return out;
}

std::string kendall_curve_csv(const std::map<int, double>& curve) {
  std::string out = "K,tau\n";
  for (const auto& [k, tau] : curve) {
    out += std::to_string(k) + ',' + format_double(tau) + '\n';
  }
  return out;
}

std::string comparison_text(const PoolComparison& comparison, const AgreementReport& agreement) {
  std::string out;
  out += "metric " + comparison.ranking_a.metric_id + '\n';
  out += "tie_policy " + comparison.ranking_a.tie_policy + '\n';
  out += "n_systems " + std::to_string(comparison.ranking_a.size()) + '\n';
  out += "tau " + format_double(comparison.tau) + '\n';
  out += "kappa_binary " + format_double(agreement.kappa_binary) + '\n';
  out += "kappa_graded " + format_double(agreement.kappa_graded) + '\n';
  out += "common_keys " + std::to_string(agreement.n_common) + '\n';
  out += "only_first " + std::to_string(agreement.n_only_first) + '\n';
  out += "only_second " + std::to_string(agreement.n_only_second) + '\n';
  return out;
}

}  // namespace refill
