#pragma once

// Declarative experiment configuration: one JSON file, flag overrides on top.
// Unknown keys are rejected so typos never silently change an experiment;
// referenced input paths must exist at load time. Relative paths resolve
// against the config file's directory.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "refill/backends.hpp"
#include "refill/pooling.hpp"
#include "refill/simulation.hpp"

namespace refill {

struct Config {
  struct Paths {
    std::string runs_dir;
    std::string qrels;
    std::string topics;
    std::string passages;
    std::string team_map;
    std::string cache_dir = "cache";
    std::string output_dir = "out";
  } paths;

  PoolConfig pool;
  MetricConfig metric;

  struct BackendBlock {
    std::string id = "mock";  // mock | oracle | remote
    std::string oracle_qrels;  // reference for the oracle; empty = paths.qrels
    RemoteBackendConfig remote;
    int max_retries = 3;
    int backoff_ms = 1000;
  } backend;

  struct TemplateBlock {
    std::string shots = "one";
    bool include_context = false;
    int context_turns = 4;
    std::string file;  // template text file; empty = built-in default
  } tmpl;

  std::string depth_pattern;  // empty = default pattern
  std::uint64_t seed = 42;
  int jobs = 1;

  static Config load_file(const std::string& path);
  static Config from_json(const nlohmann::json& doc, const std::string& base_dir);

  /// Resolved configuration, suitable for manifests.
  nlohmann::json to_json() const;
};

}  // namespace refill
