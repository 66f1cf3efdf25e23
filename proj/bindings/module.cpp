// Python bindings for the core operations: parsing, pooling, metrics,
// assessor backends, splits, and the leave-one-out sweep.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "refill/assessor.hpp"
#include "refill/backends.hpp"
#include "refill/collection.hpp"
#include "refill/errors.hpp"
#include "refill/metrics.hpp"
#include "refill/pooling.hpp"
#include "refill/prompt.hpp"
#include "refill/simulation.hpp"

namespace py = pybind11;
using namespace refill;

namespace {

GainFunction gain_of(const std::string& name) {
  if (name == "linear") return GainFunction::linear;
  if (name == "exponential") return GainFunction::exponential;
  raise(Errc::invalid_argument, "gain must be 'linear' or 'exponential'");
}

GroupMode group_mode_of(const std::string& name) {
  if (name == "model") return GroupMode::model;
  if (name == "team") return GroupMode::team;
  raise(Errc::invalid_argument, "mode must be 'model' or 'team'");
}

DepthPattern pattern_of(const std::string& text) {
  return text.empty() ? DepthPattern::default_pattern() : DepthPattern::compile(text);
}

/// Owning assessor assembly for the duration of one binding call.
struct LocalAssessor {
  std::shared_ptr<Backend> backend;
  std::unique_ptr<Assessor> assessor;
  std::unique_ptr<RequestSource> requests;
  DepthPattern pattern = DepthPattern::default_pattern();

  LocalAssessor(const std::string& backend_id, const ConversationSet& conversations,
                const std::map<std::string, std::string>& passages,
                const JudgmentSet* reference, const JudgmentSet& exemplar_pool,
                const std::string& pattern_text, const std::string& shots,
                bool include_context, std::uint64_t seed, int relevant_threshold) {
    pattern = pattern_of(pattern_text);
    if (backend_id == "mock") {
      backend = std::make_shared<MockBackend>();
    } else if (backend_id == "oracle") {
      if (!reference) raise(Errc::invalid_argument, "oracle backend needs reference judgments");
      backend = std::make_shared<OracleBackend>(reference);
    } else {
      raise(Errc::invalid_argument, "python bindings support the mock and oracle backends");
    }
    PromptTemplate tmpl;
    tmpl.shots = shot_count_from_string(shots);
    tmpl.include_context = include_context;
    ExemplarSource exemplars(&conversations, &exemplar_pool, &passages, relevant_threshold,
                             &pattern);
    assessor = std::make_unique<Assessor>(backend, tmpl, exemplars, nullptr, seed,
                                          RetryPolicy{3, 1});
    requests = std::make_unique<RequestSource>(&conversations, &passages, &pattern);
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Judgment-hole simulation and repair for conversational search collections";

  py::register_exception<Error>(m, "RefillError");

  py::class_<SystemRun>(m, "SystemRun")
      .def(py::init<>())
      .def_readwrite("system_id", &SystemRun::system_id)
      .def_readwrite("team_id", &SystemRun::team_id)
      .def_readwrite("rankings", &SystemRun::rankings);

  py::class_<Judgment>(m, "Judgment")
      .def(py::init<>())
      .def_readwrite("grade", &Judgment::grade)
      .def_readwrite("source", &Judgment::source);

  py::class_<JudgmentSet>(m, "JudgmentSet")
      .def(py::init<>())
      .def_readwrite("labels", &JudgmentSet::labels)
      .def("__len__", &JudgmentSet::size)
      .def("grade", &JudgmentSet::grade)
      .def("contains", &JudgmentSet::contains)
      .def("query_ids", &JudgmentSet::query_ids)
      .def("all_human", &JudgmentSet::all_human);

  py::class_<Turn>(m, "Turn")
      .def_readonly("turn_index", &Turn::turn_index)
      .def_readonly("utterance", &Turn::utterance)
      .def_readonly("resolved_utterance", &Turn::resolved_utterance)
      .def_readonly("response", &Turn::response);

  py::class_<Conversation>(m, "Conversation")
      .def_readonly("conversation_id", &Conversation::conversation_id)
      .def_readonly("aux_text", &Conversation::aux_text)
      .def_readonly("turns", &Conversation::turns);

  py::class_<PoolConfig>(m, "PoolConfig")
      .def(py::init<>())
      .def(py::init([](int k_pool, int k_eval, int relevant_threshold) {
             return PoolConfig{k_pool, k_eval, relevant_threshold};
           }),
           py::arg("k_pool") = 10, py::arg("k_eval") = 10, py::arg("relevant_threshold") = 2)
      .def_readwrite("k_pool", &PoolConfig::k_pool)
      .def_readwrite("k_eval", &PoolConfig::k_eval)
      .def_readwrite("relevant_threshold", &PoolConfig::relevant_threshold);

  py::class_<HoleStats>(m, "HoleStats")
      .def_readonly("missing", &HoleStats::missing)
      .def_readonly("missing_relevant", &HoleStats::missing_relevant);

  py::class_<DepthStats>(m, "DepthStats")
      .def_readonly("mean_missing", &DepthStats::mean_missing)
      .def_readonly("sd_missing", &DepthStats::sd_missing)
      .def_readonly("mean_missing_relevant", &DepthStats::mean_missing_relevant)
      .def_readonly("sd_missing_relevant", &DepthStats::sd_missing_relevant);

  py::class_<HoleReport>(m, "HoleReport")
      .def_readonly("group_id", &HoleReport::group_id)
      .def_readonly("per_query", &HoleReport::per_query)
      .def_readonly("per_depth", &HoleReport::per_depth);

  py::class_<UnjudgedResult>(m, "UnjudgedResult")
      .def_readonly("per_query", &UnjudgedResult::per_query)
      .def_readonly("mean", &UnjudgedResult::mean);

  py::class_<NdcgResult>(m, "NdcgResult")
      .def_readonly("per_query", &NdcgResult::per_query)
      .def_readonly("mean", &NdcgResult::mean);

  py::class_<SystemRanking>(m, "SystemRanking")
      .def_readonly("entries", &SystemRanking::entries)
      .def_readonly("metric_id", &SystemRanking::metric_id)
      .def_readonly("tie_policy", &SystemRanking::tie_policy)
      .def("position", &SystemRanking::position)
      .def("systems", &SystemRanking::systems)
      .def("__len__", &SystemRanking::size);

  py::class_<GroupSpec>(m, "GroupSpec")
      .def_readonly("group_id", &GroupSpec::group_id)
      .def_readonly("systems", &GroupSpec::systems);

  py::class_<RunRow>(m, "RunRow")
      .def_readonly("system_id", &RunRow::system_id)
      .def_readonly("unjudged", &RunRow::unjudged)
      .def_readonly("d_hole", &RunRow::d_hole)
      .def_readonly("d_filled", &RunRow::d_filled);

  py::class_<DepthRow>(m, "DepthRow")
      .def_readonly("depth", &DepthRow::depth)
      .def_readonly("tau_hole", &DepthRow::tau_hole)
      .def_readonly("tau_filled", &DepthRow::tau_filled)
      .def_readonly("mean_d_hole", &DepthRow::mean_d_hole)
      .def_readonly("mean_d_filled", &DepthRow::mean_d_filled);

  py::class_<GroupReport>(m, "GroupReport")
      .def_readonly("group_id", &GroupReport::group_id)
      .def_readonly("systems", &GroupReport::systems)
      .def_readonly("n_holes", &GroupReport::n_holes)
      .def_readonly("n_failed", &GroupReport::n_failed)
      .def_readonly("filled_fraction", &GroupReport::filled_fraction)
      .def_readonly("mean_unjudged", &GroupReport::mean_unjudged)
      .def_readonly("tau_hole", &GroupReport::tau_hole)
      .def_readonly("tau_filled", &GroupReport::tau_filled)
      .def_readonly("runs", &GroupReport::runs)
      .def_readonly("depths", &GroupReport::depths);

  // ---- parsing and serialization ----
  m.def("parse_run", &parse_run, py::arg("text"));
  m.def("write_run", &write_run, py::arg("runs"));
  m.def("parse_qrels", &parse_qrels, py::arg("text"));
  m.def("write_qrels", &write_qrels, py::arg("judgments"));
  m.def("write_provenance", &write_provenance, py::arg("judgments"));
  m.def("parse_topics", &parse_topics, py::arg("json_text"));
  m.def("parse_team_map", &parse_team_map, py::arg("text"));
  m.def("map_teams", &map_teams, py::arg("runs"), py::arg("system_to_team"));
  m.def("parse_passages", &parse_passages, py::arg("text"));
  m.def(
      "extract_depth",
      [](const std::string& query_id, const std::string& pattern) {
        return pattern_of(pattern).extract(query_id);
      },
      py::arg("query_id"), py::arg("pattern") = "");

  // ---- pooling ----
  m.def("make_groups",
        [](const RunSet& runs, const std::string& mode) {
          return make_groups(runs, group_mode_of(mode));
        },
        py::arg("runs"), py::arg("mode") = "model");
  m.def("build_pool", &build_pool, py::arg("runs"), py::arg("cfg"));
  m.def("unique_contributions", &unique_contributions, py::arg("runs"), py::arg("group_systems"),
        py::arg("cfg"));
  m.def(
      "make_hole_pool",
      [](const JudgmentSet& pool, const RunSet& runs, const std::vector<std::string>& group,
         const PoolConfig& cfg) {
        const HolePool hp = make_hole_pool(pool, runs, group, cfg);
        return py::make_tuple(hp.hole_pool, hp.holes.removed);
      },
      py::arg("pool"), py::arg("runs"), py::arg("group_systems"), py::arg("cfg"));
  m.def(
      "hole_report",
      [](const JudgmentSet& pool, const RunSet& runs, const std::string& group_id,
         const std::vector<std::string>& systems, const PoolConfig& cfg,
         const std::map<std::string, int>& depths) {
        return hole_report(pool, runs, GroupSpec{group_id, systems}, cfg, depths);
      },
      py::arg("pool"), py::arg("runs"), py::arg("group_id"), py::arg("systems"), py::arg("cfg"),
      py::arg("depths"));
  m.def("unjudged_at_k", &unjudged_at_k, py::arg("run"), py::arg("pool"), py::arg("cfg"));

  // ---- metrics ----
  m.def(
      "ndcg_at_k",
      [](const SystemRun& run, const JudgmentSet& pool, int k, const std::string& gain) {
        return ndcg_at_k(run, pool, k, gain_of(gain));
      },
      py::arg("run"), py::arg("pool"), py::arg("k") = 5, py::arg("gain") = "linear");
  m.def(
      "rank_systems",
      [](const RunSet& runs, const JudgmentSet& pool, int k, const std::string& gain) {
        return rank_systems(runs, pool, k, gain_of(gain));
      },
      py::arg("runs"), py::arg("pool"), py::arg("k") = 5, py::arg("gain") = "linear");
  m.def("kendall_tau", &kendall_tau, py::arg("a"), py::arg("b"));
  m.def(
      "cohen_kappa",
      [](const std::map<PairKey, int>& a, const std::map<PairKey, int>& b,
         const std::string& mode, int threshold) {
        return cohen_kappa(a, b, mode == "graded" ? KappaMode::graded : KappaMode::binary,
                           threshold);
      },
      py::arg("a"), py::arg("b"), py::arg("mode") = "binary", py::arg("threshold") = 2);
  m.def("rank_distance", &rank_distance, py::arg("system_id"), py::arg("a"), py::arg("b"));
  m.def("kendall_at_k_curve", &kendall_at_k_curve, py::arg("reference"), py::arg("candidate"),
        py::arg("k_values"));

  // ---- assessor ----
  m.def("mock_grade", &mock_grade, py::arg("resolved_utterance"), py::arg("passage"));
  m.def("parse_grade", &parse_grade, py::arg("raw"));
  m.def(
      "fill_holes",
      [](const JudgmentSet& hole_pool, const std::set<PairKey>& removed,
         const ConversationSet& conversations, const std::map<std::string, std::string>& passages,
         const std::string& backend, const JudgmentSet* reference, const std::string& pattern,
         const std::string& shots, bool include_context, std::uint64_t seed, int threshold) {
        LocalAssessor local(backend, conversations, passages, reference, hole_pool, pattern,
                            shots, include_context, seed, threshold);
        const HoleSet holes{removed};
        FillResult result = fill_holes(hole_pool, holes, *local.assessor,
                                       local.requests->build_for(removed), 1);
        return py::make_tuple(result.pool, result.failed);
      },
      py::arg("hole_pool"), py::arg("removed"), py::arg("conversations"), py::arg("passages"),
      py::arg("backend") = "mock", py::arg("reference") = nullptr, py::arg("pattern") = "",
      py::arg("shots") = "zero", py::arg("include_context") = false, py::arg("seed") = 0,
      py::arg("relevant_threshold") = 2);
  m.def(
      "regenerate_pool",
      [](const JudgmentSet& pool, const ConversationSet& conversations,
         const std::map<std::string, std::string>& passages, const std::string& backend,
         const JudgmentSet* reference, const std::string& pattern, const std::string& shots,
         bool include_context, std::uint64_t seed, int threshold) {
        LocalAssessor local(backend, conversations, passages, reference, pool, pattern, shots,
                            include_context, seed, threshold);
        std::set<PairKey> keys;
        for (const auto& [key, judgment] : pool.labels) keys.insert(key);
        FillResult result =
            regenerate_pool(pool, *local.assessor, local.requests->build_for(keys), 1);
        return py::make_tuple(result.pool, result.failed);
      },
      py::arg("pool"), py::arg("conversations"), py::arg("passages"), py::arg("backend") = "mock",
      py::arg("reference") = nullptr, py::arg("pattern") = "", py::arg("shots") = "zero",
      py::arg("include_context") = false, py::arg("seed") = 0, py::arg("relevant_threshold") = 2);

  // ---- simulation ----
  m.def(
      "run_leave_one_out",
      [](const RunSet& runs, const JudgmentSet& pool, const ConversationSet& conversations,
         const std::map<std::string, std::string>& passages, const std::string& mode,
         const std::string& backend, const JudgmentSet* reference, const PoolConfig& pool_cfg,
         int metric_k, const std::string& gain, bool per_depth, const std::string& pattern,
         const std::string& shots, bool include_context, std::uint64_t seed) {
        LocalAssessor local(backend, conversations, passages, reference, pool, pattern, shots,
                            include_context, seed, pool_cfg.relevant_threshold);
        ExperimentConfig cfg;
        cfg.mode = group_mode_of(mode);
        cfg.pool = pool_cfg;
        cfg.metric = MetricConfig{metric_k, gain_of(gain)};
        cfg.per_depth = per_depth;
        std::set<std::string> queries = all_query_ids(runs);
        for (const auto& query_id : pool.query_ids()) queries.insert(query_id);
        const auto depths = depth_map(queries, local.pattern);
        return run_leave_one_out(runs, pool, *local.assessor, *local.requests, depths, cfg);
      },
      py::arg("runs"), py::arg("pool"), py::arg("conversations"), py::arg("passages"),
      py::arg("mode") = "model", py::arg("backend") = "mock", py::arg("reference") = nullptr,
      py::arg("pool_cfg") = PoolConfig{}, py::arg("metric_k") = 5, py::arg("gain") = "linear",
      py::arg("per_depth") = false, py::arg("pattern") = "", py::arg("shots") = "zero",
      py::arg("include_context") = false, py::arg("seed") = 0);
  m.def(
      "compare_pools",
      [](const RunSet& runs, const JudgmentSet& a, const JudgmentSet& b, int k,
         const std::string& gain) {
        const PoolComparison cmp = compare_pools(runs, a, b, MetricConfig{k, gain_of(gain)});
        return py::make_tuple(cmp.ranking_a, cmp.ranking_b, cmp.tau, cmp.distance);
      },
      py::arg("runs"), py::arg("pool_a"), py::arg("pool_b"), py::arg("k") = 5,
      py::arg("gain") = "linear");
  m.def(
      "agreement_report",
      [](const JudgmentSet& first, const JudgmentSet& second, int threshold) {
        const AgreementReport report = agreement_report(first, second, threshold);
        return py::make_tuple(report.kappa_binary, report.kappa_graded, report.n_common);
      },
      py::arg("first"), py::arg("second"), py::arg("relevant_threshold") = 2);
  m.def(
      "make_split",
      [](const JudgmentSet& pool, double train, double test, double validation, int threshold,
         std::uint64_t seed) {
        SplitSpec spec;
        spec.ratios = {train, test, validation};
        spec.relevant_threshold = threshold;
        spec.rng_seed = seed;
        const SplitResult result = make_split(pool, spec);
        return py::make_tuple(result.train, result.test, result.validation,
                              result.unbalanceable);
      },
      py::arg("pool"), py::arg("train") = 0.70, py::arg("test") = 0.15,
      py::arg("validation") = 0.15, py::arg("relevant_threshold") = 2, py::arg("seed") = 0);

  m.attr("__all__") = py::make_tuple(
      "RefillError", "SystemRun", "Judgment", "JudgmentSet", "Turn", "Conversation",
      "PoolConfig", "HoleStats", "DepthStats", "HoleReport", "UnjudgedResult", "NdcgResult",
      "SystemRanking", "GroupSpec", "RunRow", "DepthRow", "GroupReport", "parse_run",
      "write_run", "parse_qrels", "write_qrels", "write_provenance", "parse_topics",
      "parse_team_map", "map_teams", "parse_passages", "extract_depth", "make_groups",
      "build_pool", "unique_contributions", "make_hole_pool", "hole_report", "unjudged_at_k",
      "ndcg_at_k", "rank_systems", "kendall_tau", "cohen_kappa", "rank_distance",
      "kendall_at_k_curve", "mock_grade", "parse_grade", "fill_holes", "regenerate_pool",
      "run_leave_one_out", "compare_pools", "agreement_report", "make_split");
}
