#include "refill/config.hpp"

#include <filesystem>
#include <set>

#include "refill/errors.hpp"
#include "refill/io.hpp"

namespace refill {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      raise(Errc::config_error, "unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& target) {
  if (const auto it = obj.find(key); it != obj.end()) {
    try {
      target = it->get<T>();
    } catch (const json::exception&) {
      raise(Errc::config_error, std::string("bad value for '") + key + "'");
    }
  }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty()) return path;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

void require_exists(const std::string& path, const char* what) {
  if (path.empty()) return;
  if (!fs::exists(path)) {
    raise(Errc::config_error, std::string(what) + " path does not exist: " + path);
  }
}

GainFunction gain_from_string(const std::string& name) {
  if (name == "linear") return GainFunction::linear;
  if (name == "exponential") return GainFunction::exponential;
  raise(Errc::config_error, "metric.gain must be 'linear' or 'exponential'");
}

}  // namespace

Config Config::load_file(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    raise(Errc::config_error, "cannot read config file " + path);
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(Errc::config_error, path + ": " + e.what());
  }
  return from_json(doc, fs::path(path).parent_path().string());
}

Config Config::from_json(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) raise(Errc::config_error, "config root must be an object");
  reject_unknown_keys(doc, {"paths", "pool", "metric", "backend", "template",
                            "depth_pattern", "seed", "jobs"},
                      "config");
  Config cfg;

  if (const auto it = doc.find("paths"); it != doc.end()) {
    reject_unknown_keys(*it, {"runs_dir", "qrels", "topics", "passages", "team_map",
                              "cache_dir", "output_dir"},
                        "paths");
    read_into(*it, "runs_dir", cfg.paths.runs_dir);
    read_into(*it, "qrels", cfg.paths.qrels);
    read_into(*it, "topics", cfg.paths.topics);
    read_into(*it, "passages", cfg.paths.passages);
    read_into(*it, "team_map", cfg.paths.team_map);
    read_into(*it, "cache_dir", cfg.paths.cache_dir);
    read_into(*it, "output_dir", cfg.paths.output_dir);
  }
  for (std::string* p : {&cfg.paths.runs_dir, &cfg.paths.qrels, &cfg.paths.topics,
                         &cfg.paths.passages, &cfg.paths.team_map, &cfg.paths.cache_dir,
                         &cfg.paths.output_dir}) {
    *p = resolve(base_dir, *p);
  }
  // Inputs must exist up front; cache and output directories get created.
  require_exists(cfg.paths.runs_dir, "runs_dir");
  require_exists(cfg.paths.qrels, "qrels");
  require_exists(cfg.paths.topics, "topics");
  require_exists(cfg.paths.passages, "passages");
  require_exists(cfg.paths.team_map, "team_map");

  if (const auto it = doc.find("pool"); it != doc.end()) {
    reject_unknown_keys(*it, {"k_pool", "k_eval", "relevant_threshold"}, "pool");
    read_into(*it, "k_pool", cfg.pool.k_pool);
    read_into(*it, "k_eval", cfg.pool.k_eval);
    read_into(*it, "relevant_threshold", cfg.pool.relevant_threshold);
  }
  if (cfg.pool.k_pool < 1 || cfg.pool.k_eval < 1) {
    raise(Errc::config_error, "pool depths must be positive");
  }
  if (cfg.pool.relevant_threshold < kMinGrade || cfg.pool.relevant_threshold > kMaxGrade) {
    raise(Errc::config_error, "pool.relevant_threshold out of range");
  }

  if (const auto it = doc.find("metric"); it != doc.end()) {
    reject_unknown_keys(*it, {"k", "gain"}, "metric");
    read_into(*it, "k", cfg.metric.k);
    std::string gain = "linear";
    read_into(*it, "gain", gain);
    cfg.metric.gain = gain_from_string(gain);
  }
  if (cfg.metric.k < 1) raise(Errc::config_error, "metric.k must be positive");

  if (const auto it = doc.find("backend"); it != doc.end()) {
    reject_unknown_keys(*it, {"id", "oracle_qrels", "endpoint", "model", "temperature",
                              "top_p", "api_key_env", "timeout_s", "max_retries",
                              "backoff_ms"},
                        "backend");
    read_into(*it, "id", cfg.backend.id);
    read_into(*it, "oracle_qrels", cfg.backend.oracle_qrels);
    read_into(*it, "endpoint", cfg.backend.remote.endpoint);
    read_into(*it, "model", cfg.backend.remote.model);
    read_into(*it, "temperature", cfg.backend.remote.temperature);
    read_into(*it, "top_p", cfg.backend.remote.top_p);
    read_into(*it, "api_key_env", cfg.backend.remote.api_key_env);
    read_into(*it, "timeout_s", cfg.backend.remote.timeout_s);
    read_into(*it, "max_retries", cfg.backend.max_retries);
    read_into(*it, "backoff_ms", cfg.backend.backoff_ms);
  }
  cfg.backend.oracle_qrels = resolve(base_dir, cfg.backend.oracle_qrels);
  require_exists(cfg.backend.oracle_qrels, "backend.oracle_qrels");
  if (cfg.backend.id != "mock" && cfg.backend.id != "oracle" && cfg.backend.id != "remote") {
    raise(Errc::config_error, "backend.id must be mock, oracle, or remote");
  }

  if (const auto it = doc.find("template"); it != doc.end()) {
    reject_unknown_keys(*it, {"shots", "include_context", "context_turns", "file"},
                        "template");
    read_into(*it, "shots", cfg.tmpl.shots);
    read_into(*it, "include_context", cfg.tmpl.include_context);
    read_into(*it, "context_turns", cfg.tmpl.context_turns);
    read_into(*it, "file", cfg.tmpl.file);
  }
  if (cfg.tmpl.shots != "zero" && cfg.tmpl.shots != "one" && cfg.tmpl.shots != "two") {
    raise(Errc::config_error, "template.shots must be zero, one, or two");
  }
  cfg.tmpl.file = resolve(base_dir, cfg.tmpl.file);
  require_exists(cfg.tmpl.file, "template.file");

  read_into(doc, "depth_pattern", cfg.depth_pattern);
  read_into(doc, "seed", cfg.seed);
  read_into(doc, "jobs", cfg.jobs);
  if (cfg.jobs < 1) raise(Errc::config_error, "jobs must be positive");
  return cfg;
}

nlohmann::json Config::to_json() const {
  return {
      {"paths",
       {{"runs_dir", paths.runs_dir},
        {"qrels", paths.qrels},
        {"topics", paths.topics},
        {"passages", paths.passages},
        {"team_map", paths.team_map},
        {"cache_dir", paths.cache_dir},
        {"output_dir", paths.output_dir}}},
      {"pool",
       {{"k_pool", pool.k_pool},
        {"k_eval", pool.k_eval},
        {"relevant_threshold", pool.relevant_threshold}}},
      {"metric",
       {{"k", metric.k},
        {"gain", metric.gain == GainFunction::linear ? "linear" : "exponential"}}},
      {"backend",
       {{"id", backend.id},
        {"oracle_qrels", backend.oracle_qrels},
        {"endpoint", backend.remote.endpoint},
        {"model", backend.remote.model},
        {"temperature", backend.remote.temperature},
        {"top_p", backend.remote.top_p},
        {"api_key_env", backend.remote.api_key_env},
        {"timeout_s", backend.remote.timeout_s},
        {"max_retries", backend.max_retries},
        {"backoff_ms", backend.backoff_ms}}},
      {"template",
       {{"shots", tmpl.shots},
        {"include_context", tmpl.include_context},
        {"context_turns", tmpl.context_turns},
        {"file", tmpl.file}}},
      {"depth_pattern", depth_pattern},
      {"seed", seed},
      {"jobs", jobs},
  };
}

}  // namespace refill
