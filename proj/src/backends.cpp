#include "refill/backends.hpp"

#include <cctype>
#include <cstdlib>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "refill/errors.hpp"

namespace refill {

namespace {

std::set<std::string> tokenize(const std::string& text) {
  std::set<std::string> out;
  std::string token;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!token.empty()) {
      out.insert(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) out.insert(std::move(token));
  return out;
}

}  // namespace

int mock_grade(const std::string& resolved_utterance, const std::string& passage) {
  const auto utterance_tokens = tokenize(resolved_utterance);
  if (utterance_tokens.empty()) return 0;
  const auto passage_tokens = tokenize(passage);
  std::size_t shared = 0;
  for (const auto& token : utterance_tokens) {
    if (passage_tokens.count(token)) ++shared;
  }
  const double recall =
      static_cast<double>(shared) / static_cast<double>(utterance_tokens.size());
  const int grade = static_cast<int>(5.0 * recall);
  return std::min(grade, kMaxGrade);
}

const std::string& MockBackend::id() const {
  static const std::string kId = "mock";
  return kId;
}

std::string MockBackend::complete(const std::string&, const AssessmentRequest& request) {
  return std::to_string(mock_grade(request.resolved_utterance, request.passage));
}

OracleBackend::OracleBackend(const JudgmentSet* reference) : reference_(reference) {}

const std::string& OracleBackend::id() const {
  static const std::string kId = "oracle";
  return kId;
}

std::string OracleBackend::complete(const std::string&, const AssessmentRequest& request) {
  const auto grade = reference_->grade(request.query_id, request.doc_id);
  if (!grade) {
    raise(Errc::missing_reference,
          "(" + request.query_id + ", " + request.doc_id + ") not in reference judgments");
  }
  return std::to_string(*grade);
}

RemoteBackend::RemoteBackend(RemoteBackendConfig cfg) : cfg_(std::move(cfg)) {
  const std::string& url = cfg_.endpoint;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    raise(Errc::config_error, "endpoint must start with http:// or https://");
  }
  const std::string scheme = url.substr(0, scheme_end);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    raise(Errc::config_error, "https endpoint requires a TLS-enabled build");
  }
#endif
  if (scheme != "http" && scheme != "https") {
    raise(Errc::config_error, "unsupported scheme '" + scheme + "'");
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  base_ = path_start == std::string::npos ? url : url.substr(0, path_start);
  path_ = path_start == std::string::npos ? std::string{} : url.substr(path_start);
  if (path_.empty() || path_ == "/") path_ = "/v1/chat/completions";
  id_ = cfg_.model.empty() ? "remote" : cfg_.model;
}

const std::string& RemoteBackend::id() const { return id_; }

std::string RemoteBackend::complete(const std::string& prompt, const AssessmentRequest&) {
  nlohmann::json body = {
      {"model", cfg_.model},
      {"temperature", cfg_.temperature},
      {"top_p", cfg_.top_p},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
  };

  httplib::Client client(base_);
  client.set_connection_timeout(cfg_.timeout_s);
  client.set_read_timeout(cfg_.timeout_s);
  httplib::Headers headers;
  if (!cfg_.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result) {
    raise(Errc::backend_unavailable, base_ + ": " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    raise(Errc::backend_unavailable, base_ + " returned HTTP " + std::to_string(result->status));
  }
  try {
    const auto response = nlohmann::json::parse(result->body);
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::backend_unavailable, std::string("malformed completion response: ") + e.what());
  }
}

}  // namespace refill
