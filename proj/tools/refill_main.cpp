// refill: measure and repair the reusability of conversational-search test
// collections: build hole pools from leave-one-out sweeps, fill them with a
// pluggable assessor backend, and compare the repaired evaluation against the
// original pool.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "refill/assessor.hpp"
#include "refill/backends.hpp"
#include "refill/cache.hpp"
#include "refill/collection.hpp"
#include "refill/config.hpp"
#include "refill/errors.hpp"
#include "refill/io.hpp"
#include "refill/metrics.hpp"
#include "refill/pooling.hpp"
#include "refill/prompt.hpp"
#include "refill/report_io.hpp"
#include "refill/sha256.hpp"
#include "refill/simulation.hpp"

namespace {

using json = nlohmann::json;
using namespace refill;

constexpr const char* kVersion = "0.1.0";

struct CommonFlags {
  std::string config_path;
  std::string output_dir;
  std::string mode = "model";
  std::string backend_id;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> k_pool;
  std::optional<int> k_eval;
  bool dry_run = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_mode) {
  cmd->add_option("-c,--config", flags.config_path, "Configuration file (JSON)")->required();
  cmd->add_option("--out", flags.output_dir, "Override the output directory");
  cmd->add_option("--seed", flags.seed, "Override the experiment seed");
  cmd->add_option("--jobs", flags.jobs, "Worker parallelism bound");
  cmd->add_option("--k-pool", flags.k_pool, "Override the pooling depth");
  cmd->add_option("--k-eval", flags.k_eval, "Override the Unjudged@k depth");
  cmd->add_option("--backend", flags.backend_id, "Override the assessor backend (mock|oracle|remote)");
  cmd->add_flag("--dry-run", flags.dry_run, "Print the resolved plan without running");
  if (with_mode) {
    cmd->add_option("--mode", flags.mode, "Leave-one-out grouping: model or team")
        ->check(CLI::IsMember({"model", "team"}));
  }
}

Config load_config(const CommonFlags& flags) {
  Config cfg = Config::load_file(flags.config_path);
  if (!flags.output_dir.empty()) cfg.paths.output_dir = flags.output_dir;
  if (!flags.backend_id.empty()) cfg.backend.id = flags.backend_id;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (flags.k_pool) cfg.pool.k_pool = *flags.k_pool;
  if (flags.k_eval) cfg.pool.k_eval = *flags.k_eval;
  if (cfg.backend.id != "mock" && cfg.backend.id != "oracle" && cfg.backend.id != "remote") {
    raise(Errc::config_error, "backend must be mock, oracle, or remote");
  }
  return cfg;
}

GroupMode mode_of(const std::string& name) {
  return name == "team" ? GroupMode::team : GroupMode::model;
}

std::string require_path(const std::string& path, const char* what) {
  if (path.empty()) {
    raise(Errc::config_error, std::string("paths.") + what + " is required for this command");
  }
  return path;
}

// Flag-supplied inputs bypass Config validation; a bad path is still a
// configuration error, not a runtime one.
std::string require_file(const std::string& path, const char* what) {
  if (!std::filesystem::exists(path)) {
    raise(Errc::config_error, std::string(what) + " does not exist: " + path);
  }
  return path;
}

RunSet load_runs(const Config& cfg, bool need_teams) {
  const std::string dir = require_path(cfg.paths.runs_dir, "runs_dir");
  std::vector<RunRecord> records;
  for (const auto& file : list_files(dir)) {
    auto file_records = parse_run_records(read_file(file));
    records.insert(records.end(), file_records.begin(), file_records.end());
  }
  RunSet runs = group_runs(records);
  if (runs.empty()) raise(Errc::empty_input, "no run records under " + dir);
  if (need_teams) {
    const std::string map_path = require_path(cfg.paths.team_map, "team_map");
    runs = map_teams(std::move(runs), parse_team_map(read_file(map_path)));
  }
  return runs;
}

JudgmentSet load_qrels(const std::string& path) { return parse_qrels(read_file(path)); }

DepthPattern load_pattern(const Config& cfg) {
  return cfg.depth_pattern.empty() ? DepthPattern::default_pattern()
                                   : DepthPattern::compile(cfg.depth_pattern);
}

PromptTemplate load_template(const Config& cfg) {
  PromptTemplate tmpl;
  tmpl.shots = shot_count_from_string(cfg.tmpl.shots);
  tmpl.include_context = cfg.tmpl.include_context;
  tmpl.context_turns = cfg.tmpl.context_turns;
  if (!cfg.tmpl.file.empty()) tmpl.template_text = read_file(cfg.tmpl.file);
  return tmpl;
}

/// Everything a backend-driven command needs, with owning storage so the
/// non-owning views inside Assessor stay valid.
struct AssessorBundle {
  std::unique_ptr<JudgmentSet> oracle_reference;
  ConversationSet conversations;
  std::map<std::string, std::string> passages;
  DepthPattern pattern = DepthPattern::default_pattern();
  std::unique_ptr<JudgmentCache> cache;
  std::shared_ptr<Backend> backend;
  std::unique_ptr<Assessor> assessor;
  std::unique_ptr<RequestSource> requests;
};

AssessorBundle make_assessor(const Config& cfg, const JudgmentSet& pool) {
  AssessorBundle bundle;
  bundle.pattern = load_pattern(cfg);
  bundle.conversations = parse_topics(read_file(require_path(cfg.paths.topics, "topics")));
  bundle.passages = parse_passages(read_file(require_path(cfg.paths.passages, "passages")));

  if (cfg.backend.id == "mock") {
    bundle.backend = std::make_shared<MockBackend>();
  } else if (cfg.backend.id == "oracle") {
    bundle.oracle_reference = std::make_unique<JudgmentSet>(
        cfg.backend.oracle_qrels.empty() ? pool : load_qrels(cfg.backend.oracle_qrels));
    bundle.backend = std::make_shared<OracleBackend>(bundle.oracle_reference.get());
  } else {
    bundle.backend = std::make_shared<RemoteBackend>(cfg.backend.remote);
  }

  bundle.cache = std::make_unique<JudgmentCache>(cfg.paths.cache_dir);
  ExemplarSource exemplars(&bundle.conversations, &pool, &bundle.passages,
                           cfg.pool.relevant_threshold, &bundle.pattern);
  RetryPolicy retry{cfg.backend.max_retries, cfg.backend.backoff_ms};
  bundle.assessor = std::make_unique<Assessor>(bundle.backend, load_template(cfg), exemplars,
                                               bundle.cache.get(),
                                               derive_seed(cfg.seed, "assess"), retry);
  bundle.requests =
      std::make_unique<RequestSource>(&bundle.conversations, &bundle.passages, &bundle.pattern);
  return bundle;
}

std::string out_path(const Config& cfg, const std::string& name) {
  return cfg.paths.output_dir + "/" + name;
}

void write_manifest(const Config& cfg, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, const json& counts) {
  json input_digests = json::object();
  for (const auto& path : inputs) {
    if (!path.empty()) input_digests[path] = sha256_file_hex(path);
  }
  const json manifest = {{"command", command},
                         {"config", cfg.to_json()},
                         {"counts", counts},
                         {"inputs", input_digests},
                         {"outputs", outputs},
                         {"seed", cfg.seed},
                         {"version", kVersion}};
  write_file(out_path(cfg, command + ".manifest.json"), manifest.dump(2) + "\n");
}

int print_plan(const Config& cfg, const std::string& command, const json& extra) {
  json plan = {{"command", command}, {"config", cfg.to_json()}};
  for (const auto& [key, value] : extra.items()) plan[key] = value;
  std::cout << plan.dump(2) << "\n";
  return 0;
}

// ---- subcommands ----

int cmd_rank(const CommonFlags& flags, const std::string& qrels_override) {
  const Config cfg = load_config(flags);
  if (flags.dry_run) return print_plan(cfg, "rank", {{"qrels", qrels_override}});
  const RunSet runs = load_runs(cfg, false);
  const std::string qrels_path = qrels_override.empty()
                                   ? require_path(cfg.paths.qrels, "qrels")
                                   : require_file(qrels_override, "--qrels file");
  const JudgmentSet pool = load_qrels(qrels_path);
  const SystemRanking ranking = rank_systems(runs, pool, cfg.metric.k, cfg.metric.gain);
  const std::string csv = ranking_csv(ranking);
  write_file(out_path(cfg, "ranking.csv"), csv);
  std::cout << csv;
  write_manifest(cfg, "rank", {qrels_path}, {"ranking.csv"},
                 {{"n_systems", ranking.size()}, {"n_judgments", pool.size()}});
  return 0;
}

int cmd_pool_stats(const CommonFlags& flags) {
  const Config cfg = load_config(flags);
  if (flags.dry_run) return print_plan(cfg, "pool-stats", {{"mode", flags.mode}});
  const GroupMode mode = mode_of(flags.mode);
  const RunSet runs = load_runs(cfg, mode == GroupMode::team);
  const JudgmentSet pool = load_qrels(require_path(cfg.paths.qrels, "qrels"));
  const DepthPattern pattern = load_pattern(cfg);
  const auto depths = depth_map(all_query_ids(runs), pattern);

  std::vector<HoleReport> reports;
  for (const auto& group : make_groups(runs, mode)) {
    reports.push_back(hole_report(pool, runs, group, cfg.pool, depths));
  }
  write_file(out_path(cfg, "hole_per_query.csv"), hole_per_query_csv(reports, depths));
  write_file(out_path(cfg, "hole_per_depth.csv"),
             hole_per_depth_csv(aggregate_hole_reports(reports)));
  write_manifest(cfg, "pool-stats", {cfg.paths.qrels, cfg.paths.team_map},
                 {"hole_per_query.csv", "hole_per_depth.csv"},
                 {{"n_groups", reports.size()},
                  {"mode", flags.mode},
                  {"mean_phi", overall_mean_missing(reports)}});
  std::cout << "pool-stats: " << reports.size() << " groups, mean phi "
            << format_double(overall_mean_missing(reports)) << "\n";
  return 0;
}

int cmd_simulate(const CommonFlags& flags, bool per_depth, const std::string& depth_list) {
  const Config cfg = load_config(flags);
  if (flags.dry_run) {
    return print_plan(cfg, "simulate",
                      {{"mode", flags.mode}, {"per_depth", per_depth}, {"depths", depth_list}});
  }
  const GroupMode mode = mode_of(flags.mode);
  const RunSet runs = load_runs(cfg, mode == GroupMode::team);
  const JudgmentSet pool = load_qrels(require_path(cfg.paths.qrels, "qrels"));
  AssessorBundle bundle = make_assessor(cfg, pool);

  ExperimentConfig experiment;
  experiment.mode = mode;
  experiment.pool = cfg.pool;
  experiment.metric = cfg.metric;
  experiment.per_depth = per_depth || !depth_list.empty();
  experiment.jobs = cfg.jobs;
  if (!depth_list.empty()) {
    std::vector<int> parsed;
    std::size_t pos = 0;
    while (pos < depth_list.size()) {
      const std::size_t comma = depth_list.find(',', pos);
      const std::string token = depth_list.substr(pos, comma - pos);
      try {
        parsed.push_back(std::stoi(token));
      } catch (const std::exception&) {
        raise(Errc::config_error, "bad depth '" + token + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    experiment.depth_filter = parsed;
  }

  std::set<std::string> depth_queries = all_query_ids(runs);
  for (const auto& query_id : pool.query_ids()) depth_queries.insert(query_id);
  const auto depths = depth_map(depth_queries, bundle.pattern);

  const auto reports =
      run_leave_one_out(runs, pool, *bundle.assessor, *bundle.requests, depths, experiment);

  std::vector<std::string> outputs = {"simulate_groups.csv", "simulate_runs.csv"};
  write_file(out_path(cfg, "simulate_groups.csv"), simulate_groups_csv(reports));
  write_file(out_path(cfg, "simulate_runs.csv"), simulate_runs_csv(reports));
  if (experiment.per_depth) {
    write_file(out_path(cfg, "simulate_depth.csv"), simulate_depth_csv(reports));
    write_file(out_path(cfg, "simulate_depth_agg.csv"), simulate_depth_aggregate_csv(reports));
    outputs.push_back("simulate_depth.csv");
    outputs.push_back("simulate_depth_agg.csv");
  }

  std::size_t total_holes = 0, total_failed = 0;
  for (const auto& report : reports) {
    total_holes += report.n_holes;
    total_failed += report.n_failed;
  }
  write_manifest(cfg, "simulate", {cfg.paths.qrels, cfg.paths.topics, cfg.paths.passages,
                                   cfg.paths.team_map},
                 outputs,
                 {{"n_groups", reports.size()},
                  {"mode", flags.mode},
                  {"backend", cfg.backend.id},
                  {"total_holes", total_holes},
                  {"total_failed", total_failed}});
  std::cout << "simulate: " << reports.size() << " groups, " << total_holes << " holes, "
            << total_failed << " failures\n";
  return total_failed == 0 ? 0 : 1;
}

int cmd_assess(const CommonFlags& flags, const std::string& target,
               const std::string& testset_path, const std::string& group_id) {
  const Config cfg = load_config(flags);
  if (flags.dry_run) {
    return print_plan(cfg, "assess", {{"target", target}, {"group", group_id}});
  }
  const JudgmentSet pool = load_qrels(require_path(cfg.paths.qrels, "qrels"));
  AssessorBundle bundle = make_assessor(cfg, pool);

  FillResult result;
  json counts;
  std::vector<std::string> inputs = {cfg.paths.qrels, cfg.paths.topics, cfg.paths.passages};
  if (target == "holes") {
    if (group_id.empty()) raise(Errc::config_error, "--target holes requires --group");
    const GroupMode mode = mode_of(flags.mode);
    const RunSet runs = load_runs(cfg, mode == GroupMode::team);
    std::vector<std::string> group_systems;
    for (const auto& group : make_groups(runs, mode)) {
      if (group.group_id == group_id) group_systems = group.systems;
    }
    if (group_systems.empty()) raise(Errc::unknown_system, group_id);
    const HolePool hp = make_hole_pool(pool, runs, group_systems, cfg.pool);
    result = fill_holes(hp.hole_pool, hp.holes, *bundle.assessor,
                        bundle.requests->build_for(hp.holes.removed), cfg.jobs);
    counts["n_holes"] = hp.holes.removed.size();
  } else {
    const JudgmentSet* target_pool = &pool;
    JudgmentSet testset;
    if (target == "testset") {
      if (testset_path.empty()) raise(Errc::config_error, "--target testset requires --testset");
      testset = load_qrels(require_file(testset_path, "--testset file"));
      target_pool = &testset;
      inputs.push_back(testset_path);
    } else if (target != "full") {
      raise(Errc::config_error, "--target must be holes, full, or testset");
    }
    std::set<PairKey> keys;
    for (const auto& [key, judgment] : target_pool->labels) keys.insert(key);
    result = regenerate_pool(*target_pool, *bundle.assessor, bundle.requests->build_for(keys),
                             cfg.jobs);
  }

  write_file(out_path(cfg, "assessed_qrels.txt"), write_qrels(result.pool));
  write_file(out_path(cfg, "assessed_qrels.provenance.tsv"), write_provenance(result.pool));
  counts["n_labels"] = result.pool.size();
  counts["n_assessed"] = result.n_assessed;
  counts["n_failed"] = result.failed.size();
  counts["target"] = target;
  write_manifest(cfg, "assess", inputs,
                 {"assessed_qrels.txt", "assessed_qrels.provenance.tsv"}, counts);
  std::cout << "assess: " << result.n_assessed << " pairs graded, " << result.failed.size()
            << " failures\n";
  return result.failed.empty() ? 0 : 1;
}

int cmd_compare(const CommonFlags& flags, const std::string& qrels_a,
                const std::string& qrels_b) {
  const Config cfg = load_config(flags);
  if (flags.dry_run) {
    return print_plan(cfg, "compare", {{"qrels_a", qrels_a}, {"qrels_b", qrels_b}});
  }
  const RunSet runs = load_runs(cfg, false);
  const JudgmentSet pool_a = load_qrels(require_file(qrels_a, "qrels_a"));
  const JudgmentSet pool_b = load_qrels(require_file(qrels_b, "qrels_b"));
  const PoolComparison comparison = compare_pools(runs, pool_a, pool_b, cfg.metric);
  const AgreementReport agreement =
      agreement_report(pool_a, pool_b, cfg.pool.relevant_threshold);

  std::vector<int> k_values;
  for (int k = 2; k <= static_cast<int>(comparison.ranking_a.size()); ++k) k_values.push_back(k);
  std::map<int, double> curve;
  if (!k_values.empty()) {
    curve = kendall_at_k_curve(comparison.ranking_a, comparison.ranking_b, k_values);
  }

  const std::string text = comparison_text(comparison, agreement);
  write_file(out_path(cfg, "comparison.csv"), comparison_csv(comparison));
  write_file(out_path(cfg, "comparison.txt"), text);
  write_file(out_path(cfg, "kendall_at_k.csv"), kendall_curve_csv(curve));
  std::cout << text;
  write_manifest(cfg, "compare", {qrels_a, qrels_b},
                 {"comparison.csv", "comparison.txt", "kendall_at_k.csv"},
                 {{"tau", comparison.tau},
                  {"kappa_binary", agreement.kappa_binary},
                  {"kappa_graded", agreement.kappa_graded}});
  return 0;
}

int cmd_split(const CommonFlags& flags) {
  const Config cfg = load_config(flags);
  if (flags.dry_run) return print_plan(cfg, "split", json::object());
  const JudgmentSet pool = load_qrels(require_path(cfg.paths.qrels, "qrels"));
  SplitSpec spec;
  spec.relevant_threshold = cfg.pool.relevant_threshold;
  spec.rng_seed = derive_seed(cfg.seed, "split");
  const SplitResult result = make_split(pool, spec);
  write_file(out_path(cfg, "train.qrels"), write_qrels(result.train));
  write_file(out_path(cfg, "test.qrels"), write_qrels(result.test));
  write_file(out_path(cfg, "validation.qrels"), write_qrels(result.validation));
  write_manifest(cfg, "split", {cfg.paths.qrels},
                 {"train.qrels", "test.qrels", "validation.qrels"},
                 {{"n_train", result.train.size()},
                  {"n_test", result.test.size()},
                  {"n_validation", result.validation.size()},
                  {"unbalanceable_queries", result.unbalanceable}});
  std::cout << "split: " << result.train.size() << "/" << result.test.size() << "/"
            << result.validation.size() << " (" << result.unbalanceable.size()
            << " queries unbalanceable)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"refill: judgment-hole simulation and repair for conversational search collections"};
  app.require_subcommand(1);

  CommonFlags rank_flags;
  std::string rank_qrels;
  CLI::App* rank = app.add_subcommand("rank", "Rank systems by mean nDCG@k under a pool");
  add_common_flags(rank, rank_flags, false);
  rank->add_option("--qrels", rank_qrels, "Rank under this qrels file instead of the configured one");

  CommonFlags pool_flags;
  CLI::App* pool_stats =
      app.add_subcommand("pool-stats", "Per-depth missing-judgment statistics per held-out group");
  add_common_flags(pool_stats, pool_flags, true);

  CommonFlags sim_flags;
  bool sim_per_depth = false;
  std::string sim_depths;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Leave-one-out sweep: hole pools, filling, and rank fidelity");
  add_common_flags(simulate, sim_flags, true);
  simulate->add_flag("--per-depth", sim_per_depth, "Add per-depth breakdowns");
  simulate->add_option("--depths", sim_depths, "Comma-separated depth filter (implies --per-depth)");

  CommonFlags assess_flags;
  std::string assess_target = "full";
  std::string assess_testset;
  std::string assess_group;
  CLI::App* assess = app.add_subcommand("assess", "Grade judgment pairs with the configured backend");
  add_common_flags(assess, assess_flags, true);
  assess->add_option("--target", assess_target, "holes | full | testset")
      ->check(CLI::IsMember({"holes", "full", "testset"}));
  assess->add_option("--testset", assess_testset, "Qrels file whose pairs to grade (testset target)");
  assess->add_option("--group", assess_group, "Held-out group whose holes to fill (holes target)");

  CommonFlags compare_flags;
  std::string compare_a, compare_b;
  CLI::App* compare =
      app.add_subcommand("compare", "Rank correlation and label agreement between two pools");
  add_common_flags(compare, compare_flags, false);
  compare->add_option("qrels_a", compare_a, "First qrels file")->required();
  compare->add_option("qrels_b", compare_b, "Second qrels file")->required();

  CommonFlags split_flags;
  CLI::App* split = app.add_subcommand("split", "Balanced train/test/validation split of a pool");
  add_common_flags(split, split_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a configuration error
  }

  try {
    if (rank->parsed()) return cmd_rank(rank_flags, rank_qrels);
    if (pool_stats->parsed()) return cmd_pool_stats(pool_flags);
    if (simulate->parsed()) return cmd_simulate(sim_flags, sim_per_depth, sim_depths);
    if (assess->parsed()) return cmd_assess(assess_flags, assess_target, assess_testset, assess_group);
    if (compare->parsed()) return cmd_compare(compare_flags, compare_a, compare_b);
    if (split->parsed()) return cmd_split(split_flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::config_error ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
