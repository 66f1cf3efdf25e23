#include "refill/assessor.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "refill/errors.hpp"

namespace refill {

namespace {

std::string now_utc_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Per-index exceptions
/// are the caller's to capture inside fn; anything escaping fn is rethrown
/// after all workers join.
template <typename Fn>
void for_each_index(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int n_threads = std::min<int>(jobs, static_cast<int>(n));
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& thread : threads) thread.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct GradeSlot {
  bool ok = false;
  int grade = 0;
};

}  // namespace

Assessor::Assessor(std::shared_ptr<Backend> backend, PromptTemplate tmpl,
                   ExemplarSource exemplars, JudgmentCache* cache, std::uint64_t seed,
                   RetryPolicy retry)
    : backend_(std::move(backend)),
      tmpl_(std::move(tmpl)),
      exemplars_(std::move(exemplars)),
      cache_(cache),
      seed_(seed),
      retry_(retry) {}

AssessmentRecord Assessor::assess(const AssessmentRequest& request) {
  const BuiltPrompt prompt = build_prompt(tmpl_, request, exemplars_, seed_);
  if (cache_) {
    if (auto hit = cache_->lookup(backend_->id(), prompt.hash)) return *hit;
  }

  std::string prompt_text = prompt.text;
  bool reprompted = false;
  int attempts = 0;
  int backoff_ms = retry_.backoff_initial_ms;
  std::string raw;
  int grade = 0;
  for (;;) {
    try {
      raw = backend_->complete(prompt_text, request);
    } catch (const Error& e) {
      if (e.code() == Errc::backend_unavailable && ++attempts < retry_.max_attempts) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
        continue;
      }
      throw;
    }
    try {
      grade = parse_grade(raw);
      break;
    } catch (const Error& e) {
      if (e.code() == Errc::unparsable_grade && !reprompted) {
        reprompted = true;
        prompt_text = prompt.text + "\nAnswer with a single integer 0-4.";
        continue;
      }
      throw;
    }
  }

  AssessmentRecord record{request.query_id, request.doc_id, grade,
                          backend_->id(),   prompt.hash,    raw,
                          now_utc_iso8601()};
  if (cache_) cache_->put(record);
  return record;
}

RequestSource::RequestSource(const ConversationSet* conversations,
                             const std::map<std::string, std::string>* passages,
                             const DepthPattern* pattern)
    : conversations_(conversations), passages_(passages), pattern_(pattern) {}

AssessmentRequest RequestSource::build(const std::string& query_id,
                                       const std::string& doc_id) const {
  const auto [conversation_id, depth] = pattern_->split(query_id);
  const auto conv_it = conversations_->find(conversation_id);
  if (conv_it == conversations_->end()) {
    raise(Errc::unknown_query, query_id + " (no conversation '" + conversation_id + "')");
  }
  const Conversation& conversation = conv_it->second;
  const Turn* turn = conversation.find_turn(depth);
  if (!turn) {
    raise(Errc::unknown_query,
          query_id + " (no turn " + std::to_string(depth) + " in '" + conversation_id + "')");
  }
  const auto passage_it = passages_->find(doc_id);
  if (passage_it == passages_->end()) raise(Errc::missing_passage, doc_id);

  AssessmentRequest request;
  request.query_id = query_id;
  request.doc_id = doc_id;
  request.resolved_utterance = turn->resolved_utterance;
  for (int i = 1; i < depth; ++i) {
    const Turn* prior = conversation.find_turn(i);
    request.context.emplace_back(prior->utterance, prior->response);
  }
  request.passage = passage_it->second;
  return request;
}

std::map<PairKey, AssessmentRequest> RequestSource::build_for(
    const std::set<PairKey>& pairs) const {
  std::map<PairKey, AssessmentRequest> out;
  for (const auto& [query_id, doc_id] : pairs) {
    out.emplace(PairKey{query_id, doc_id}, build(query_id, doc_id));
  }
  return out;
}

namespace {

/// Shared engine for fill_holes / regenerate_pool: assess `targets` in
/// deterministic order, collecting per-pair failures instead of aborting.
void assess_into(const std::vector<PairKey>& targets, Assessor& assessor,
                 const std::map<PairKey, AssessmentRequest>& requests, int jobs,
                 JudgmentSet& out, std::vector<PairKey>& failed, std::size_t& n_assessed) {
  for (const auto& pair : targets) {
    if (!requests.count(pair)) {
      raise(Errc::missing_request, "(" + pair.first + ", " + pair.second + ")");
    }
  }
  std::vector<GradeSlot> slots(targets.size());
  const std::string source = "assessor:" + assessor.backend_id();
  for_each_index(targets.size(), jobs, [&](std::size_t i) {
    try {
      slots[i].grade = assessor.assess(requests.at(targets[i])).grade;
      slots[i].ok = true;
    } catch (const Error&) {
      // Reported per pair below; the sweep continues.
    }
  });
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (slots[i].ok) {
      out.labels[targets[i]] = Judgment{slots[i].grade, source};
      ++n_assessed;
    } else {
      failed.push_back(targets[i]);
    }
  }
}

}  // namespace

FillResult fill_holes(const JudgmentSet& hole_pool, const HoleSet& holes, Assessor& assessor,
                      const std::map<PairKey, AssessmentRequest>& requests, int jobs) {
  FillResult result;
  result.pool = hole_pool;
  const std::vector<PairKey> targets(holes.removed.begin(), holes.removed.end());
  assess_into(targets, assessor, requests, jobs, result.pool, result.failed, result.n_assessed);
  return result;
}

FillResult regenerate_pool(const JudgmentSet& pool, Assessor& assessor,
                           const std::map<PairKey, AssessmentRequest>& requests, int jobs) {
  FillResult result;
  std::vector<PairKey> targets;
  targets.reserve(pool.size());
  for (const auto& [key, judgment] : pool.labels) targets.push_back(key);
  assess_into(targets, assessor, requests, jobs, result.pool, result.failed, result.n_assessed);
  return result;
}

}  // namespace refill
