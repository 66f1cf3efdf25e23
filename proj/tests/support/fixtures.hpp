#pragma once

// Deterministic synthetic collections for tests: runs with team structure,
// a judged pool over the union top-k, conversations with resolved utterances
// and canonical responses, and passage texts drawn from a small vocabulary so
// the mock backend produces a spread of grades.

#include <cstdint>
#include <map>
#include <string>

#include "refill/collection.hpp"
#include "refill/rng.hpp"

namespace refill::testsupport {

struct SyntheticSpec {
  int n_systems = 8;
  int n_teams = 3;
  int n_conversations = 10;
  int depth = 5;
  int n_passages = 200;
  int ranking_len = 20;  // docs each system returns per query
  int pool_k = 10;       // top-k judged when building the human pool
  std::uint64_t seed = 1234;
};

struct SyntheticCollection {
  RunSet runs;  // team ids assigned
  std::map<std::string, std::string> team_map;
  JudgmentSet pool;  // human grades over the union top-pool_k
  ConversationSet conversations;
  std::map<std::string, std::string> passages;
  std::map<std::string, int> depths;  // per query id ("c<i>_<t>")
};

SyntheticCollection make_synthetic(const SyntheticSpec& spec = {});

/// Writes runs/<system>.txt, qrels.txt, topics.json, passages.tsv, teams.tsv
/// under dir.
void write_collection_files(const SyntheticCollection& collection, const std::string& dir);

/// Writes a config file referencing the collection files in dir; returns its
/// path. `extra_json_fields` is spliced into the JSON object (e.g. backend or
/// template blocks); pass "" for defaults.
std::string write_config_file(const std::string& dir, const std::string& extra_json_fields);

/// Absolute path of the CLI binary (REFILL_CLI env var, set by ctest).
std::string cli_path();

/// Unique scratch directory under the system temp dir.
std::string make_temp_dir(const std::string& tag);

}  // namespace refill::testsupport
