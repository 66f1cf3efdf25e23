#include <doctest.h>

#include <filesystem>
#include <string>

#include "refill/config.hpp"
#include "refill/errors.hpp"
#include "refill/io.hpp"
#include "support/fixtures.hpp"

using namespace refill;
namespace ts = refill::testsupport;

namespace {

std::string make_inputs(const std::string& dir) {
  const auto collection = ts::make_synthetic({.n_systems = 2, .n_conversations = 2, .seed = 3});
  ts::write_collection_files(collection, dir);
  return dir;
}

}  // namespace

TEST_CASE("config loads with defaults and resolves relative paths") {
  const auto dir = make_inputs(ts::make_temp_dir("config_ok"));
  const auto path = ts::write_config_file(dir, R"(  "seed": 99,
  "pool": {"k_pool": 7},
  "metric": {"k": 3, "gain": "exponential"},
  "backend": {"id": "oracle"},
  "template": {"shots": "two", "include_context": true})");
  const Config cfg = Config::load_file(path);
  CHECK(cfg.seed == 99);
  CHECK(cfg.pool.k_pool == 7);
  CHECK(cfg.pool.k_eval == 10);  // default
  CHECK(cfg.metric.k == 3);
  CHECK(cfg.metric.gain == GainFunction::exponential);
  CHECK(cfg.backend.id == "oracle");
  CHECK(cfg.tmpl.shots == "two");
  CHECK(cfg.tmpl.include_context);
  CHECK(std::filesystem::path(cfg.paths.qrels).is_absolute());
  CHECK(std::filesystem::exists(cfg.paths.qrels));
  // Round-trips through to_json with the same values.
  CHECK(cfg.to_json()["seed"] == 99);
  CHECK(cfg.to_json()["metric"]["gain"] == "exponential");
}

TEST_CASE("config rejects unknown keys at any level") {
  const auto dir = make_inputs(ts::make_temp_dir("config_unknown"));
  for (const char* extra : {R"(  "surprise": 1)", R"(  "pool": {"k": 3})",
                            R"(  "backend": {"ids": "mock"})"}) {
    const auto path = ts::write_config_file(dir, extra);
    try {
      Config::load_file(path);
      FAIL("expected config_error for: ", extra);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::config_error);
    }
  }
}

TEST_CASE("config rejects missing referenced paths") {
  const auto dir = make_inputs(ts::make_temp_dir("config_missing"));
  std::filesystem::remove(std::filesystem::path(dir) / "qrels.txt");
  try {
    Config::load_file(ts::write_config_file(dir, ""));
    FAIL("expected config_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_error);
    CHECK(std::string(e.what()).find("qrels") != std::string::npos);
  }
}

TEST_CASE("config validates enums and ranges") {
  const auto dir = make_inputs(ts::make_temp_dir("config_values"));
  for (const char* extra :
       {R"(  "backend": {"id": "gpt"})", R"(  "metric": {"gain": "log"})",
        R"(  "template": {"shots": "three"})", R"(  "jobs": 0)",
        R"(  "pool": {"relevant_threshold": 9})", R"(  "pool": {"k_pool": 0})"}) {
    const auto path = ts::write_config_file(dir, extra);
    try {
      Config::load_file(path);
      FAIL("expected config_error for: ", extra);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::config_error);
    }
  }
}

TEST_CASE("config rejects malformed json") {
  const auto dir = ts::make_temp_dir("config_bad_json");
  const auto path = (std::filesystem::path(dir) / "config.json").string();
  write_file(path, "{not json");
  try {
    Config::load_file(path);
    FAIL("expected config_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_error);
  }
}
