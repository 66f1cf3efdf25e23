#pragma once

// Assessor backends. Each one turns an assessment request into a raw textual
// verdict; grade extraction and retry policy live in Assessor.

#include <map>
#include <memory>
#include <string>

#include "refill/assessment.hpp"
#include "refill/collection.hpp"

namespace refill {

class Backend {
 public:
  virtual ~Backend() = default;
  virtual const std::string& id() const = 0;
  /// Throws Errc::backend_unavailable on transport or service failure.
  virtual std::string complete(const std::string& prompt, const AssessmentRequest& request) = 0;
};

/// Deterministic offline grade. Tokenizes the resolved utterance and passage
/// into lowercase alphanumeric runs; with r = |shared distinct tokens| /
/// |distinct utterance tokens|, the grade is floor(5r) clamped to 0..4.
/// An utterance with no tokens grades 0. Tests recompute this formula
/// independently.
int mock_grade(const std::string& resolved_utterance, const std::string& passage);

class MockBackend final : public Backend {
 public:
  const std::string& id() const override;
  std::string complete(const std::string& prompt, const AssessmentRequest& request) override;
};

/// Replays reference judgments; the perfect assessor.
class OracleBackend final : public Backend {
 public:
  explicit OracleBackend(const JudgmentSet* reference);
  const std::string& id() const override;
  /// Throws Errc::missing_reference when the pair is not in the reference.
  std::string complete(const std::string& prompt, const AssessmentRequest& request) override;

 private:
  const JudgmentSet* reference_;
};

/// Minimal chat-completion wire contract.
struct RemoteBackendConfig {
  std::string endpoint;  // http(s)://host[:port][/path]; path defaults to /v1/chat/completions
  std::string model;
  double temperature = 0.0;
  double top_p = 1.0;
  std::string api_key_env;  // env var holding the bearer token; empty = no auth header
  int timeout_s = 60;
};

class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(RemoteBackendConfig cfg);
  const std::string& id() const override;
  std::string complete(const std::string& prompt, const AssessmentRequest& request) override;

 private:
  RemoteBackendConfig cfg_;
  std::string id_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace refill
