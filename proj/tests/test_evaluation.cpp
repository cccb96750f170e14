#include <doctest.h>

#include <set>

#include "test_util.hpp"
#include "wordrep/evaluation.hpp"

using namespace wordrep;

namespace {

std::vector<std::string> random_iob(Rng& rng, std::size_t n) {
  const std::vector<std::string> tags{"O", "B-A", "I-A", "B-B", "I-B"};
  std::vector<std::string> out;
  for (std::size_t t = 0; t < n; ++t)
    out.push_back(tags[rng.uniform_index(tags.size())]);
  return repair_iob(out);
}

// Independent span extraction used only by the tests.
std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::string>>
oracle_spans(const std::vector<std::vector<std::string>>& tags) {
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::string>> spans;
  for (std::size_t s = 0; s < tags.size(); ++s) {
    std::size_t t = 0;
    while (t < tags[s].size()) {
      if (tags[s][t][0] != 'B') {
        ++t;
        continue;
      }
      const std::string type = tags[s][t].substr(2);
      std::size_t end = t + 1;
      while (end < tags[s].size() && tags[s][end] == "I-" + type) ++end;
      spans.insert({s, t, end, type});
      t = end;
    }
  }
  return spans;
}

}  // namespace

TEST_CASE("eval: token accuracy hand values and errors") {
  const std::vector<std::string> gold{"A", "B", "C", "D"};
  CHECK(token_accuracy(gold, gold) == 1.0);
  const std::vector<std::string> pred{"A", "B", "C", "X"};
  CHECK(token_accuracy(gold, pred) == 0.75);
  const std::vector<std::string> shorter{"A"};
  CHECK_THROWS_AS(token_accuracy(gold, shorter), DomainError);
}

TEST_CASE("eval: token accuracy equals a position-by-position counter") {
  Rng rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::string>> gold, pred;
    std::size_t hits = 0, total = 0;
    const std::size_t sentences = 1 + rng.uniform_index(5);
    for (std::size_t s = 0; s < sentences; ++s) {
      const std::size_t n = 1 + rng.uniform_index(8);
      std::vector<std::string> g, p;
      for (std::size_t t = 0; t < n; ++t) {
        g.push_back("L" + std::to_string(rng.uniform_index(3)));
        p.push_back("L" + std::to_string(rng.uniform_index(3)));
        ++total;
        if (g.back() == p.back()) ++hits;
      }
      gold.push_back(std::move(g));
      pred.push_back(std::move(p));
    }
    CHECK(token_accuracy(gold, pred) ==
          doctest::Approx(static_cast<double>(hits) / total).epsilon(1e-15));
  }
}

TEST_CASE("eval: span F1 hand values") {
  // gold spans (0,1,NP) and (3,4,VP) in inclusive-token notation
  const std::vector<std::vector<std::string>> gold{
      {"B-NP", "I-NP", "O", "B-VP", "I-VP"}};
  const std::vector<std::vector<std::string>> pred{
      {"B-NP", "I-NP", "O", "B-VP", "O"}};
  PRF prf = span_f1(gold, pred);
  CHECK(prf.precision == 0.5);
  CHECK(prf.recall == 0.5);
  CHECK(prf.f1 == 0.5);

  CHECK(span_f1(gold, gold).f1 == 1.0);

  const std::vector<std::vector<std::string>> none{{"O", "O", "O", "O", "O"}};
  PRF empty = span_f1(gold, none);
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  const std::vector<std::vector<std::string>> bad{{"I-NP", "O", "O", "O", "O"}};
  CHECK_THROWS_AS(span_f1(gold, bad), DomainError);
}

TEST_CASE("eval: span F1 swaps precision and recall under argument swap") {
  Rng rng(92);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::vector<std::string>> gold, pred;
    const std::size_t sentences = 1 + rng.uniform_index(4);
    for (std::size_t s = 0; s < sentences; ++s) {
      const std::size_t n = 1 + rng.uniform_index(10);
      gold.push_back(random_iob(rng, n));
      pred.push_back(random_iob(rng, n));
    }
    PRF ab = span_f1(gold, pred);
    PRF ba = span_f1(pred, gold);
    CHECK(ab.precision == doctest::Approx(ba.recall).epsilon(1e-12));
    CHECK(ab.recall == doctest::Approx(ba.precision).epsilon(1e-12));
    CHECK(ab.f1 == doctest::Approx(ba.f1).epsilon(1e-12));
  }
}

TEST_CASE("eval: span F1 matches the independent span oracle") {
  Rng rng(93);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::vector<std::string>> gold, pred;
    const std::size_t sentences = 1 + rng.uniform_index(4);
    for (std::size_t s = 0; s < sentences; ++s) {
      const std::size_t n = 1 + rng.uniform_index(9);
      gold.push_back(random_iob(rng, n));
      pred.push_back(random_iob(rng, n));
    }
    auto gs = oracle_spans(gold);
    auto ps = oracle_spans(pred);
    std::size_t matched = 0;
    for (const auto& span : ps) matched += gs.count(span);
    PRF prf = span_f1(gold, pred);
    const double p = ps.empty() ? 0.0 : static_cast<double>(matched) / ps.size();
    const double r = gs.empty() ? 0.0 : static_cast<double>(matched) / gs.size();
    const double f = p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
    CHECK(std::fabs(prf.f1 - f) < 1e-12);
    CHECK(std::fabs(prf.precision - p) < 1e-12);
    CHECK(std::fabs(prf.recall - r) < 1e-12);
  }
}

TEST_CASE("eval: OOV accuracy restriction semantics") {
  const Sentences sentences{{"a", "b", "c", "d"}};
  const std::vector<std::vector<std::string>> gold{{"X", "Y", "X", "Y"}};
  const std::vector<std::vector<std::string>> pred{{"X", "X", "X", "Y"}};

  // everything in vocabulary: no OOV positions, value absent
  OovAccuracy all_known =
      oov_accuracy(sentences, gold, pred, {"a", "b", "c", "d"});
  CHECK(all_known.oov_count == 0);
  CHECK(!all_known.value.has_value());

  // empty vocabulary: reduces to token accuracy
  OovAccuracy all_oov = oov_accuracy(sentences, gold, pred, {});
  CHECK(all_oov.oov_count == 4);
  CHECK(*all_oov.value == token_accuracy(gold, pred));

  // mixed: b and d out of vocabulary, one of the two matches
  OovAccuracy mixed = oov_accuracy(sentences, gold, pred, {"a", "c"});
  CHECK(mixed.oov_count == 2);
  CHECK(*mixed.value == 0.5);
}

TEST_CASE("eval: OOV accuracy equals a filter-then-count oracle") {
  Rng rng(94);
  for (int trial = 0; trial < 40; ++trial) {
    Sentences sentences;
    std::vector<std::vector<std::string>> gold, pred;
    std::unordered_set<std::string> vocab;
    for (int w = 0; w < 4; ++w)
      if (rng.uniform() < 0.5) vocab.insert("w" + std::to_string(w));
    std::size_t hits = 0, total = 0;
    const std::size_t n_sentences = 1 + rng.uniform_index(4);
    for (std::size_t s = 0; s < n_sentences; ++s) {
      const std::size_t n = 1 + rng.uniform_index(7);
      std::vector<std::string> sent, g, p;
      for (std::size_t t = 0; t < n; ++t) {
        sent.push_back("w" + std::to_string(rng.uniform_index(8)));
        g.push_back("L" + std::to_string(rng.uniform_index(2)));
        p.push_back("L" + std::to_string(rng.uniform_index(2)));
        if (vocab.count(sent.back()) == 0) {
          ++total;
          if (g.back() == p.back()) ++hits;
        }
      }
      sentences.push_back(std::move(sent));
      gold.push_back(std::move(g));
      pred.push_back(std::move(p));
    }
    OovAccuracy oov = oov_accuracy(sentences, gold, pred, vocab);
    CHECK(oov.oov_count == total);
    if (total == 0) {
      CHECK(!oov.value.has_value());
    } else {
      CHECK(*oov.value ==
            doctest::Approx(static_cast<double>(hits) / total).epsilon(1e-15));
    }
  }
}

TEST_CASE("eval: learning curve exact geometric case") {
  LearningCurve curve = partition_learning_curve(1023, 10);
  REQUIRE(curve.partition_sizes.size() == 10);
  std::size_t expected = 1;
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(curve.partition_sizes[i] == expected);
    expected *= 2;
  }
  CHECK(curve.cumulative.back() == 1023);
  CHECK(curve.cumulative.front() == 1);
  CHECK(curve.cumulative[3] == 15);
  CHECK(!curve.truncated);
}

TEST_CASE("eval: learning curve rounding keeps cumulative strict and complete") {
  LearningCurve curve = partition_learning_curve(1024, 10);
  CHECK(curve.cumulative.back() == 1024);
  for (std::size_t i = 1; i < curve.cumulative.size(); ++i)
    CHECK(curve.cumulative[i] > curve.cumulative[i - 1]);
}

TEST_CASE("eval: learning curve doubling ratio property") {
  Rng rng(95);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1024 + rng.uniform_index(100000);
    LearningCurve curve = partition_learning_curve(n, 10);
    REQUIRE(curve.partition_sizes.size() == 10);
    CHECK(curve.cumulative.back() == n);
    for (std::size_t i = 1; i + 1 < curve.partition_sizes.size(); ++i) {
      const double ratio = static_cast<double>(curve.partition_sizes[i + 1]) /
                           static_cast<double>(curve.partition_sizes[i]);
      CHECK(ratio >= 1.5);
      CHECK(ratio <= 2.5);
    }
  }
}

TEST_CASE("eval: learning curve degenerate inputs") {
  CHECK_THROWS_AS(partition_learning_curve(5, 10), EmptyInputError);
  LearningCurve small = partition_learning_curve(100, 10);
  CHECK(small.truncated);
  CHECK(small.partition_sizes.size() < 10);
  CHECK(small.cumulative.back() == 100);
}
