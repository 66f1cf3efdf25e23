#include "support/fixtures.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "refill/errors.hpp"
#include "refill/io.hpp"
#include "refill/pooling.hpp"

namespace refill::testsupport {

namespace {

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "glacier", "harbor",  "quartz",  "meadow",  "lantern", "orbit",   "saffron", "timber",
      "velvet",  "willow",  "anchor",  "basalt",  "cinder",  "drift",   "ember",   "fjord",
      "garnet",  "heather", "isotope", "juniper", "kelp",    "lichen",  "marble",  "nectar",
      "opal",    "prairie", "quill",   "reef",    "summit",  "tundra",  "umber",   "vapor",
      "wharf",   "yarrow",  "zephyr",  "bramble", "cove",    "dune",    "estuary", "fern"};
  return words;
}

std::string random_sentence(Rng& rng, int n_words) {
  const auto& words = vocabulary();
  std::string out;
  for (int i = 0; i < n_words; ++i) {
    if (i) out += ' ';
    out += words[static_cast<std::size_t>(rng.next_below(words.size()))];
  }
  return out;
}

std::string doc_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "d%03d", index);
  return buf;
}

}  // namespace

SyntheticCollection make_synthetic(const SyntheticSpec& spec) {
  SyntheticCollection out;

  for (int d = 0; d < spec.n_passages; ++d) {
    Rng rng(derive_seed(spec.seed, "passage/" + doc_name(d)));
    out.passages[doc_name(d)] = random_sentence(rng, 8);
  }

  for (int c = 1; c <= spec.n_conversations; ++c) {
    Conversation conv;
    conv.conversation_id = "c" + std::to_string(c);
    for (int t = 1; t <= spec.depth; ++t) {
      Rng rng(derive_seed(spec.seed, "turn/" + conv.conversation_id + "/" + std::to_string(t)));
      Turn turn;
      turn.turn_index = t;
      turn.utterance = random_sentence(rng, 4);
      turn.resolved_utterance = random_sentence(rng, 5);
      turn.response = random_sentence(rng, 7);
      conv.turns.push_back(std::move(turn));
      out.depths[conv.conversation_id + "_" + std::to_string(t)] = t;
    }
    out.conversations.emplace(conv.conversation_id, std::move(conv));
  }

  for (int s = 0; s < spec.n_systems; ++s) {
    SystemRun run;
    run.system_id = "sys" + std::string(1, static_cast<char>('A' + s));
    const std::string team = "team" + std::to_string(s % spec.n_teams + 1);
    run.team_id = team;
    out.team_map[run.system_id] = team;
    for (const auto& [query_id, depth] : out.depths) {
      Rng rng(derive_seed(spec.seed, "rank/" + run.system_id + "/" + query_id));
      std::vector<int> order(static_cast<std::size_t>(spec.n_passages));
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(order);
      std::vector<std::string> docs;
      docs.reserve(static_cast<std::size_t>(spec.ranking_len));
      for (int i = 0; i < spec.ranking_len; ++i) {
        docs.push_back(doc_name(order[static_cast<std::size_t>(i)]));
      }
      run.rankings.emplace(query_id, std::move(docs));
    }
    out.runs.emplace(run.system_id, std::move(run));
  }

  // Human pool: every pair in the union top-pool_k gets a grade. Each query
  // keeps at least one relevant and one irrelevant judgment so splits and
  // two-shot exemplars always have material.
  PoolConfig cfg;
  cfg.k_pool = spec.pool_k;
  std::map<std::string, std::pair<bool, bool>> has_rel_irr;
  for (const auto& pair : build_pool(out.runs, cfg)) {
    Rng rng(derive_seed(spec.seed, "grade/" + pair.first + "/" + pair.second));
    const int grade = static_cast<int>(rng.next_below(5));
    out.pool.labels.emplace(pair, Judgment{grade, kHumanSource});
    auto& flags = has_rel_irr[pair.first];
    flags.first = flags.first || grade >= 2;
    flags.second = flags.second || grade < 2;
  }
  for (const auto& [query_id, flags] : has_rel_irr) {
    auto first_of_query = out.pool.labels.lower_bound({query_id, ""});
    if (!flags.first) first_of_query->second.grade = 4;
    if (!flags.second) first_of_query->second.grade = 0;
  }
  return out;
}

void write_collection_files(const SyntheticCollection& collection, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "runs");

  for (const auto& [system_id, run] : collection.runs) {
    RunSet single;
    single.emplace(system_id, run);
    write_file((fs::path(dir) / "runs" / (system_id + ".txt")).string(), write_run(single));
  }
  write_file((fs::path(dir) / "qrels.txt").string(), write_qrels(collection.pool));

  nlohmann::json topics = nlohmann::json::array();
  for (const auto& [conversation_id, conv] : collection.conversations) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& turn : conv.turns) {
      turns.push_back({{"turn_index", turn.turn_index},
                       {"utterance", turn.utterance},
                       {"resolved_utterance", turn.resolved_utterance},
                       {"response", turn.response}});
    }
    topics.push_back({{"conversation_id", conversation_id}, {"turns", turns}});
  }
  write_file((fs::path(dir) / "topics.json").string(), topics.dump(2) + "\n");

  std::string passages;
  for (const auto& [doc_id, text] : collection.passages) {
    passages += doc_id + "\t" + text + "\n";
  }
  write_file((fs::path(dir) / "passages.tsv").string(), passages);

  std::string teams;
  for (const auto& [system_id, team_id] : collection.team_map) {
    teams += system_id + "\t" + team_id + "\n";
  }
  write_file((fs::path(dir) / "teams.tsv").string(), teams);
}

std::string write_config_file(const std::string& dir, const std::string& extra_json_fields) {
  std::string config = R"({
  "paths": {
    "runs_dir": "runs",
    "qrels": "qrels.txt",
    "topics": "topics.json",
    "passages": "passages.tsv",
    "team_map": "teams.tsv",
    "cache_dir": "cache",
    "output_dir": "out"
  })";
  if (!extra_json_fields.empty()) config += ",\n" + extra_json_fields;
  config += "\n}\n";
  const std::string path = (std::filesystem::path(dir) / "config.json").string();
  write_file(path, config);
  return path;
}

std::string cli_path() {
  const char* path = std::getenv("REFILL_CLI");
  return path ? path : "";
}

std::string make_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "refill_tests";
  const fs::path dir =
      base / (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace refill::testsupport
