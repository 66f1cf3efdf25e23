#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "refill/errors.hpp"
#include "refill/metrics.hpp"
#include "refill/rng.hpp"
#include "support/oracles.hpp"

using namespace refill;
namespace ts = refill::testsupport;

namespace {

SystemRun run_with(const std::string& query_id, const std::vector<std::string>& docs) {
  SystemRun run;
  run.system_id = "s";
  run.rankings.emplace(query_id, docs);
  return run;
}

JudgmentSet pool_with(const std::string& query_id,
                      const std::vector<std::pair<std::string, int>>& grades) {
  JudgmentSet pool;
  for (const auto& [doc, grade] : grades) {
    pool.labels.emplace(PairKey{query_id, doc}, Judgment{grade, kHumanSource});
  }
  return pool;
}

SystemRanking ranking_of(const std::vector<std::pair<std::string, double>>& entries) {
  SystemRanking ranking;
  ranking.entries = entries;
  ranking.metric_id = "ndcg@5";
  ranking.tie_policy = "system_id_asc";
  return ranking;
}

}  // namespace

TEST_CASE("ndcg basics") {
  SUBCASE("perfect ranking scores 1.0") {
    const auto pool = pool_with("q", {{"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}, {"e", 0}});
    const auto run = run_with("q", {"a", "b", "c", "d", "e"});
    const auto result = ndcg_at_k(run, pool, 5, GainFunction::linear);
    CHECK(result.per_query.at("q") == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("all-zero grades define nDCG as 0") {
    const auto pool = pool_with("q", {{"a", 0}, {"b", 0}});
    const auto run = run_with("q", {"a", "b"});
    CHECK(ndcg_at_k(run, pool, 5, GainFunction::linear).per_query.at("q") == 0.0);
    CHECK(ndcg_at_k(run, pool, 5, GainFunction::exponential).per_query.at("q") == 0.0);
  }

  SUBCASE("unjudged docs gain nothing; docs below k are ignored") {
    const auto pool = pool_with("q", {{"a", 3}, {"b", 2}});
    const auto with_tail = run_with("q", {"a", "b", "x1", "x2", "x3", "x4"});
    const auto without_tail = run_with("q", {"a", "b", "x1", "x2", "x3"});
    const auto v1 = ndcg_at_k(with_tail, pool, 5, GainFunction::linear).per_query.at("q");
    const auto v2 = ndcg_at_k(without_tail, pool, 5, GainFunction::linear).per_query.at("q");
    CHECK(v1 == v2);
  }

  SUBCASE("queries missing from the run score 0 and stay in the mean") {
    auto pool = pool_with("q1", {{"a", 3}});
    for (const auto& [key, judgment] : pool_with("q2", {{"b", 2}}).labels) {
      pool.labels.emplace(key, judgment);
    }
    const auto run = run_with("q1", {"a"});
    const auto result = ndcg_at_k(run, pool, 5, GainFunction::linear);
    CHECK(result.per_query.at("q2") == 0.0);
    CHECK(result.mean == doctest::Approx(0.5));
  }
}

TEST_CASE("ndcg matches the brute-force oracle on random instances") {
  Rng rng(101);
  for (int instance = 0; instance < 40; ++instance) {
    const int n_docs = 1 + static_cast<int>(rng.next_below(20));
    std::vector<std::string> docs;
    for (int d = 0; d < n_docs; ++d) docs.push_back("d" + std::to_string(d));
    std::vector<std::pair<std::string, int>> grades;
    for (int d = 0; d < n_docs; ++d) {
      if (rng.next_below(4) != 0) {
        grades.emplace_back(docs[static_cast<std::size_t>(d)],
                            static_cast<int>(rng.next_below(5)));
      }
    }
    if (grades.empty()) grades.emplace_back(docs[0], static_cast<int>(rng.next_below(5)));
    rng.shuffle(docs);
    const auto pool = pool_with("q", grades);
    const auto run = run_with("q", docs);
    const int k = 1 + static_cast<int>(rng.next_below(10));
    for (const bool exponential : {false, true}) {
      const auto gain = exponential ? GainFunction::exponential : GainFunction::linear;
      const double mine = ndcg_at_k(run, pool, k, gain).per_query.at("q");
      const double reference = ts::oracle_ndcg_query(
          docs, [&] {
            std::map<std::string, int> g;
            for (const auto& [doc, grade] : grades) g[doc] = grade;
            return g;
          }(), k, exponential);
      CHECK(mine == doctest::Approx(reference).epsilon(1e-12));
    }
  }
}

TEST_CASE("ndcg properties on random instances") {
  Rng rng(103);
  for (int instance = 0; instance < 30; ++instance) {
    const int n_docs = 5 + static_cast<int>(rng.next_below(15));
    std::vector<std::string> docs;
    std::vector<std::pair<std::string, int>> grades;
    for (int d = 0; d < n_docs; ++d) {
      docs.push_back("d" + std::to_string(d));
      grades.emplace_back(docs.back(), static_cast<int>(rng.next_below(5)));
    }
    rng.shuffle(docs);
    const auto pool = pool_with("q", grades);
    const auto run = run_with("q", docs);
    const double value = ndcg_at_k(run, pool, 5, GainFunction::linear).per_query.at("q");
    CHECK(value >= 0.0);
    CHECK(value <= 1.0 + 1e-12);

    // Swapping a lower-graded doc above a higher-graded one never helps.
    auto get_grade = [&pool](const std::string& doc) {
      const auto g = pool.grade("q", doc);
      return g ? *g : 0;
    };
    std::vector<std::string> improved = docs;
    for (std::size_t i = 0; i + 1 < improved.size(); ++i) {
      for (std::size_t j = i + 1; j < improved.size(); ++j) {
        if (get_grade(improved[i]) < get_grade(improved[j])) {
          std::swap(improved[i], improved[j]);
          const double swapped =
              ndcg_at_k(run_with("q", improved), pool, 5, GainFunction::linear)
                  .per_query.at("q");
          CHECK(swapped >= value - 1e-12);
          std::swap(improved[i], improved[j]);
        }
      }
    }
  }
}

TEST_CASE("rank_systems sorts by mean and breaks ties by id") {
  SUBCASE("single system") {
    RunSet runs;
    runs.emplace("only", run_with("q", {"a"}));
    const auto pool = pool_with("q", {{"a", 2}});
    const auto ranking = rank_systems(runs, pool, 5, GainFunction::linear);
    CHECK(ranking.size() == 1);
    CHECK(ranking.position("only") == 1);
  }

  SUBCASE("identical systems tie and order lexicographically") {
    RunSet runs;
    auto r1 = run_with("q", {"a", "b"});
    r1.system_id = "zeta";
    auto r2 = run_with("q", {"a", "b"});
    r2.system_id = "alpha";
    runs.emplace("zeta", r1);
    runs.emplace("alpha", r2);
    const auto pool = pool_with("q", {{"a", 3}, {"b", 1}});
    const auto ranking = rank_systems(runs, pool, 5, GainFunction::linear);
    CHECK(ranking.entries[0].first == "alpha");
    CHECK(ranking.entries[1].first == "zeta");
    CHECK(ranking.entries[0].second == ranking.entries[1].second);
  }

  SUBCASE("five-system fixture matches the sort oracle") {
    Rng rng(107);
    RunSet runs;
    JudgmentSet pool;
    for (int q = 0; q < 4; ++q) {
      const std::string query_id = "q" + std::to_string(q);
      for (int d = 0; d < 12; ++d) {
        pool.labels.emplace(PairKey{query_id, "d" + std::to_string(d)},
                            Judgment{static_cast<int>(rng.next_below(5)), kHumanSource});
      }
    }
    for (int s = 0; s < 5; ++s) {
      SystemRun run;
      run.system_id = "s" + std::to_string(s);
      for (int q = 0; q < 4; ++q) {
        std::vector<std::string> docs;
        for (int d = 0; d < 12; ++d) docs.push_back("d" + std::to_string(d));
        rng.shuffle(docs);
        run.rankings.emplace("q" + std::to_string(q), docs);
      }
      runs.emplace(run.system_id, std::move(run));
    }
    const auto ranking = rank_systems(runs, pool, 5, GainFunction::linear);
    const auto reference = ts::oracle_rank(runs, pool, 5, false);
    REQUIRE(ranking.size() == reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
      CHECK(ranking.entries[i].first == reference[i].first);
      CHECK(ranking.entries[i].second == doctest::Approx(reference[i].second).epsilon(1e-12));
    }
  }
}

TEST_CASE("ndcg ranking depends only on run order, not scores") {
  // Same ordering serialized with different score scales parses to the same
  // rankings, hence identical nDCG.
  const std::string base = "q Q0 a 1 100.0 s\nq Q0 b 2 50.0 s\nq Q0 c 3 10.0 s\n";
  const std::string rescaled = "q Q0 a 1 3.14 s\nq Q0 b 2 2.71 s\nq Q0 c 3 0.57 s\n";
  const auto runs_a = parse_run(base);
  const auto runs_b = parse_run(rescaled);
  CHECK(runs_a.at("s").rankings == runs_b.at("s").rankings);
  const auto pool = pool_with("q", {{"a", 1}, {"b", 4}, {"c", 2}});
  CHECK(ndcg_at_k(runs_a.at("s"), pool, 5, GainFunction::linear).mean ==
        ndcg_at_k(runs_b.at("s"), pool, 5, GainFunction::linear).mean);
}

TEST_CASE("kendall_tau") {
  SUBCASE("identical orderings give 1, reversal gives -1") {
    const auto a = ranking_of({{"s1", 0.9}, {"s2", 0.8}, {"s3", 0.7}});
    const auto b = ranking_of({{"s3", 0.99}, {"s2", 0.5}, {"s1", 0.1}});
    CHECK(kendall_tau(a, a) == doctest::Approx(1.0));
    CHECK(kendall_tau(a, b) == doctest::Approx(-1.0));
    CHECK(kendall_tau(a, b) == doctest::Approx(kendall_tau(b, a)));
  }

  SUBCASE("tied pairs match the tie-count oracle") {
    const auto a = ranking_of(
        {{"s1", 0.9}, {"s2", 0.8}, {"s3", 0.8}, {"s4", 0.5}, {"s5", 0.4}, {"s6", 0.1}});
    const auto b = ranking_of(
        {{"s2", 0.95}, {"s1", 0.9}, {"s4", 0.6}, {"s3", 0.5}, {"s6", 0.3}, {"s5", 0.3}});
    std::vector<double> xs, ys;
    std::map<std::string, double> score_b;
    for (const auto& [id, score] : b.entries) score_b[id] = score;
    for (const auto& [id, score] : a.entries) {
      xs.push_back(score);
      ys.push_back(score_b.at(id));
    }
    CHECK(kendall_tau(a, b) == doctest::Approx(ts::oracle_tau_b(xs, ys)).epsilon(1e-12));
  }

  SUBCASE("random score vectors agree with the oracle") {
    Rng rng(109);
    for (int instance = 0; instance < 50; ++instance) {
      const int n = 2 + static_cast<int>(rng.next_below(9));
      std::vector<std::pair<std::string, double>> ea, eb;
      std::vector<double> xs, ys;
      for (int i = 0; i < n; ++i) {
        // Coarse grid so ties actually happen.
        const double sa = static_cast<double>(rng.next_below(5)) / 4.0;
        const double sb = static_cast<double>(rng.next_below(5)) / 4.0;
        ea.emplace_back("s" + std::to_string(i), sa);
        eb.emplace_back("s" + std::to_string(i), sb);
        xs.push_back(sa);
        ys.push_back(sb);
      }
      auto desc = [](auto& entries) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& x, const auto& y) { return x.second > y.second; });
      };
      desc(ea);
      desc(eb);
      CHECK(kendall_tau(ranking_of(ea), ranking_of(eb)) ==
            doctest::Approx(ts::oracle_tau_b(xs, ys)).epsilon(1e-12));
    }
  }

  SUBCASE("different system sets are rejected") {
    const auto a = ranking_of({{"s1", 0.9}, {"s2", 0.8}});
    const auto b = ranking_of({{"s1", 0.9}, {"s3", 0.8}});
    try {
      kendall_tau(a, b);
      FAIL("expected system_set_mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::system_set_mismatch);
    }
  }
}

TEST_CASE("cohen_kappa") {
  const auto keys = [](int n) {
    std::vector<PairKey> out;
    for (int i = 0; i < n; ++i) out.push_back({"q", "d" + std::to_string(i)});
    return out;
  };
  const auto label_map = [&](const std::vector<int>& grades) {
    const auto ks = keys(static_cast<int>(grades.size()));
    std::map<PairKey, int> out;
    for (std::size_t i = 0; i < grades.size(); ++i) out.emplace(ks[i], grades[i]);
    return out;
  };

  SUBCASE("identical maps agree perfectly") {
    const auto a = label_map({0, 1, 2, 3, 4, 2});
    CHECK(cohen_kappa(a, a, KappaMode::binary, 2) == doctest::Approx(1.0));
    CHECK(cohen_kappa(a, a, KappaMode::graded, 2) == doctest::Approx(1.0));
  }

  SUBCASE("hand-computed zero: po equals pe") {
    // Binarized: a = [1,1,0,0], b = [1,0,0,1] -> po = 0.5, pe = 0.5, kappa 0.
    const auto a = label_map({3, 3, 0, 0});
    const auto b = label_map({3, 0, 0, 3});
    CHECK(cohen_kappa(a, b, KappaMode::binary, 2) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("graded mode matches the confusion-matrix oracle") {
    Rng rng(113);
    for (int instance = 0; instance < 30; ++instance) {
      const int n = 2 + static_cast<int>(rng.next_below(30));
      std::vector<int> ga, gb;
      for (int i = 0; i < n; ++i) {
        ga.push_back(static_cast<int>(rng.next_below(5)));
        gb.push_back(static_cast<int>(rng.next_below(5)));
      }
      CHECK(cohen_kappa(label_map(ga), label_map(gb), KappaMode::graded, 2) ==
            doctest::Approx(ts::oracle_kappa(ga, gb, 5)).epsilon(1e-12));
      std::vector<int> ba, bb;
      for (int i = 0; i < n; ++i) {
        ba.push_back(ga[static_cast<std::size_t>(i)] >= 2 ? 1 : 0);
        bb.push_back(gb[static_cast<std::size_t>(i)] >= 2 ? 1 : 0);
      }
      CHECK(cohen_kappa(label_map(ga), label_map(gb), KappaMode::binary, 2) ==
            doctest::Approx(ts::oracle_kappa(ba, bb, 2)).epsilon(1e-12));
    }
  }

  SUBCASE("kappa is symmetric") {
    const auto a = label_map({0, 4, 2, 1, 3, 3, 0});
    const auto b = label_map({1, 4, 2, 0, 2, 3, 4});
    CHECK(cohen_kappa(a, b, KappaMode::graded, 2) ==
          doctest::Approx(cohen_kappa(b, a, KappaMode::graded, 2)).epsilon(1e-12));
  }

  SUBCASE("mismatched keys and empty input are errors") {
    auto a = label_map({1, 2});
    auto b = label_map({1, 2});
    b.erase(b.begin());
    b.emplace(PairKey{"other", "d"}, 1);
    try {
      cohen_kappa(a, b, KappaMode::binary, 2);
      FAIL("expected key_set_mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::key_set_mismatch);
    }
    try {
      cohen_kappa({}, {}, KappaMode::binary, 2);
      FAIL("expected empty_input");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::empty_input);
    }
  }
}

TEST_CASE("rank_distance") {
  const auto a = ranking_of({{"s1", 0.9}, {"s2", 0.8}, {"s3", 0.7}, {"s4", 0.6}, {"s5", 0.5}});
  const auto b = ranking_of({{"s2", 0.9}, {"s4", 0.8}, {"s1", 0.7}, {"s5", 0.6}, {"s3", 0.5}});

  SUBCASE("identical rankings have distance zero") {
    for (const auto& [id, score] : a.entries) CHECK(rank_distance(id, a, a) == 0);
  }

  SUBCASE("third versus fifth is two") {
    CHECK(rank_distance("s3", a, b) == 2);
  }

  SUBCASE("matches index differences on a shuffled fixture") {
    Rng rng(127);
    std::vector<std::pair<std::string, double>> entries;
    for (int i = 0; i < 10; ++i) {
      entries.emplace_back("s" + std::to_string(i), 1.0 - 0.05 * i);
    }
    auto shuffled = entries;
    rng.shuffle(shuffled);
    for (std::size_t i = 0; i < shuffled.size(); ++i) shuffled[i].second = 1.0 - 0.05 * static_cast<double>(i);
    const auto ra = ranking_of(entries);
    const auto rb = ranking_of(shuffled);
    for (const auto& [id, score] : entries) {
      int pa = 0, pb = 0;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].first == id) pa = static_cast<int>(i) + 1;
        if (shuffled[i].first == id) pb = static_cast<int>(i) + 1;
      }
      CHECK(rank_distance(id, ra, rb) == std::abs(pa - pb));
    }
  }

  SUBCASE("triangle property holds") {
    const auto c = ranking_of({{"s5", 0.9}, {"s1", 0.8}, {"s4", 0.7}, {"s3", 0.6}, {"s2", 0.5}});
    for (const auto& [id, score] : a.entries) {
      CHECK(rank_distance(id, a, c) <= rank_distance(id, a, b) + rank_distance(id, b, c));
    }
  }

  SUBCASE("unknown system is an error") {
    try {
      rank_distance("nope", a, b);
      FAIL("expected unknown_system");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unknown_system);
    }
  }
}

TEST_CASE("kendall_at_k_curve") {
  const auto reference =
      ranking_of({{"s1", 0.9}, {"s2", 0.8}, {"s3", 0.7}, {"s4", 0.6}, {"s5", 0.5}});
  const auto candidate =
      ranking_of({{"s2", 0.9}, {"s1", 0.8}, {"s3", 0.7}, {"s5", 0.6}, {"s4", 0.5}});

  SUBCASE("restriction to all systems equals the full tau") {
    const auto curve = kendall_at_k_curve(reference, candidate, {5});
    CHECK(curve.at(5) == doctest::Approx(kendall_tau(reference, candidate)).epsilon(1e-12));
  }

  SUBCASE("candidate equal to reference is 1 at every K") {
    const auto curve = kendall_at_k_curve(reference, reference, {2, 3, 4, 5});
    for (const auto& [k, tau] : curve) CHECK(tau == doctest::Approx(1.0));
  }

  SUBCASE("out-of-range K is an error") {
    CHECK_THROWS_AS(kendall_at_k_curve(reference, candidate, {6}), Error);
  }
}
