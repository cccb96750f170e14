#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wordrep/glove.hpp"
#include "wordrep/io_util.hpp"

using namespace wordrep;
using wordrep::testing::TempDir;

namespace {

Vocabulary sized_vocab(std::size_t n) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(i));
  return build_vocabulary(tokens, 1);
}

GloveModel random_glove(Rng& rng, std::size_t vocab_size, std::size_t dim) {
  GloveModel model;
  Vocabulary vocab = sized_vocab(vocab_size);
  model.main_vectors = init_embeddings(vocab, dim, rng.next_u64());
  model.context_vectors = init_embeddings(vocab, dim, rng.next_u64());
  for (double& v : model.main_vectors.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : model.context_vectors.data) v = rng.uniform(-1.0, 1.0);
  model.main_bias.resize(vocab.size());
  model.context_bias.resize(vocab.size());
  for (double& v : model.main_bias) v = rng.uniform(-0.5, 0.5);
  for (double& v : model.context_bias) v = rng.uniform(-0.5, 0.5);
  return model;
}

// Independent quadratic-time pair counter following the same convention:
// every ordered pair within the window is credited once per direction.
CooccurrenceTable brute_force_counts(const std::vector<std::vector<WordId>>& corpus,
                                     std::size_t m) {
  CooccurrenceTable table;
  table.window = m;
  for (const auto& s : corpus)
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (i == j) continue;
        const std::size_t dist = i < j ? j - i : i - j;
        if (dist <= m) table.entries[CooccurrenceTable::key(s[i], s[j])] += 1.0;
      }
  return table;
}

}  // namespace

TEST_CASE("glove: co-occurrence hand counts") {
  std::vector<std::vector<WordId>> aba{{0, 1, 0}};
  CooccurrenceTable t1 = count_cooccurrences(aba, {.window = 1});
  CHECK(t1.at(0, 1) == 2.0);
  CHECK(t1.at(1, 0) == 2.0);

  std::vector<std::vector<WordId>> abc{{0, 1, 2}};
  CooccurrenceTable t2 = count_cooccurrences(abc, {.window = 2});
  CHECK(t2.at(0, 2) == 1.0);
  CHECK(t2.at(2, 0) == 1.0);
}

TEST_CASE("glove: counting matches the brute-force oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::vector<WordId>> corpus;
    const std::size_t sentences = 1 + rng.uniform_index(6);
    for (std::size_t s = 0; s < sentences; ++s) {
      std::vector<WordId> row(1 + rng.uniform_index(15));
      for (auto& w : row) w = static_cast<WordId>(rng.uniform_index(8));
      corpus.push_back(std::move(row));
    }
    const std::size_t m = 1 + rng.uniform_index(4);
    CooccurrenceTable fast = count_cooccurrences(corpus, {.window = m});
    CooccurrenceTable oracle = brute_force_counts(corpus, m);
    REQUIRE(fast.entries.size() == oracle.entries.size());
    for (const auto& [k, v] : oracle.entries) CHECK(fast.entries.at(k) == v);
  }
}

TEST_CASE("glove: symmetric tables satisfy X_ij == X_ji") {
  Rng rng(22);
  std::vector<std::vector<WordId>> corpus{{0, 1, 2, 1, 0, 3, 2, 2}};
  CooccurrenceTable t = count_cooccurrences(corpus, {.window = 3});
  for (const auto& [k, v] : t.entries) {
    auto [i, j] = CooccurrenceTable::unkey(k);
    CHECK(t.at(j, i) == v);
    CHECK(v > 0.0);
  }
}

TEST_CASE("glove: weighting function saturates and rejects bad counts") {
  CHECK(glove_weight(100.0, 100.0, 0.75) == 1.0);
  CHECK(glove_weight(250.0, 100.0, 0.75) == 1.0);
  CHECK(glove_weight(50.0, 100.0, 0.75) ==
        doctest::Approx(0.594603557501361).epsilon(1e-9));
  double previous = 0.0;
  for (double x : {1.0, 5.0, 20.0, 80.0, 100.0, 400.0}) {
    const double g = glove_weight(x, 100.0, 0.75);
    CHECK(g >= previous);
    CHECK(g <= 1.0);
    previous = g;
  }
  CHECK_THROWS_AS(glove_weight(0.0, 100.0, 0.75), DomainError);
  CHECK_THROWS_AS(glove_weight(-3.0, 100.0, 0.75), DomainError);
}

TEST_CASE("glove: local factor evaluates the weighted squared residual") {
  Rng rng(23);
  GloveModel model = random_glove(rng, 4, 3);

  // near-perfect fit: solve the bias for a zero residual (up to rounding)
  const double fit = dot(model.main_vectors.row(0), model.context_vectors.row(1));
  model.main_bias[0] = std::log(7.0) - fit - model.context_bias[1];
  CHECK(glove_local_factor(model, 0, 1, 7.0) == doctest::Approx(0.0).epsilon(1e-12));

  // exactly-zero residual: zero parameters against a unit count
  GloveModel exact = random_glove(rng, 3, 2);
  std::fill(exact.main_vectors.data.begin(), exact.main_vectors.data.end(), 0.0);
  std::fill(exact.context_vectors.data.begin(), exact.context_vectors.data.end(), 0.0);
  std::fill(exact.main_bias.begin(), exact.main_bias.end(), 0.0);
  std::fill(exact.context_bias.begin(), exact.context_bias.end(), 0.0);
  CHECK(glove_local_factor(exact, 0, 1, 1.0) == 0.0);
  GloveFactorGradient grad = glove_local_factor_gradient(exact, 0, 1, 1.0);
  for (double g : grad.main_i) CHECK(g == 0.0);
  for (double g : grad.context_j) CHECK(g == 0.0);
  CHECK(grad.bias_i == 0.0);
  CHECK(grad.bias_j == 0.0);

  // zero parameters, X = 100 (weight capped at 1): factor (ln 100)^2
  GloveModel zeros = random_glove(rng, 3, 2);
  std::fill(zeros.main_vectors.data.begin(), zeros.main_vectors.data.end(), 0.0);
  std::fill(zeros.context_vectors.data.begin(), zeros.context_vectors.data.end(), 0.0);
  std::fill(zeros.main_bias.begin(), zeros.main_bias.end(), 0.0);
  std::fill(zeros.context_bias.begin(), zeros.context_bias.end(), 0.0);
  CHECK(glove_local_factor(zeros, 0, 1, 100.0) ==
        doctest::Approx(std::log(100.0) * std::log(100.0)).epsilon(1e-12));

  // quadratic homogeneity: doubling the residual quadruples the factor
  const double x = 3.0;
  GloveModel scaled = zeros;
  zeros.main_bias[0] = std::log(x) + 0.4;
  scaled.main_bias[0] = std::log(x) + 0.8;
  CHECK(glove_local_factor(scaled, 0, 1, x) ==
        doctest::Approx(4.0 * glove_local_factor(zeros, 0, 1, x)).epsilon(1e-12));

  CHECK_THROWS_AS(glove_local_factor(model, 0, 1, 0.0), DomainError);
}

TEST_CASE("glove: factor gradient matches finite differences") {
  Rng rng(24);
  wordrep::testing::GradCheck check;
  for (int point = 0; point < 12; ++point) {
    GloveModel model = random_glove(rng, 5, 4);
    const WordId i = 1, j = 3;
    const double x = 0.5 + 20.0 * rng.uniform();
    GloveFactorGradient grad = glove_local_factor_gradient(model, i, j, x);

    std::vector<double*> params;
    std::vector<double> analytic;
    for (std::size_t k = 0; k < model.main_vectors.dim; ++k) {
      params.push_back(&model.main_vectors.row(i)[k]);
      analytic.push_back(grad.main_i[k]);
      params.push_back(&model.context_vectors.row(j)[k]);
      analytic.push_back(grad.context_j[k]);
    }
    params.push_back(&model.main_bias[1]);
    analytic.push_back(grad.bias_i);
    params.push_back(&model.context_bias[3]);
    analytic.push_back(grad.bias_j);
    auto loss = [&] { return glove_local_factor(model, i, j, x); };
    CHECK(check.max_error(loss, params, analytic) < 1e-4);
  }
}

TEST_CASE("glove: planted parameters are recovered") {
  Rng rng(25);
  const std::size_t v = 10, d = 3;
  Vocabulary vocab = sized_vocab(v);
  CooccurrenceTable table;
  std::vector<std::vector<double>> u(vocab.size(), std::vector<double>(d));
  std::vector<double> c(vocab.size());
  for (auto& row : u)
    for (double& x : row) x = rng.uniform(-0.6, 0.6);
  for (double& x : c) x = rng.uniform(-0.4, 0.4);
  for (std::size_t i = 0; i < vocab.size(); ++i)
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      double dotp = 0.0;
      for (std::size_t k = 0; k < d; ++k) dotp += u[i][k] * u[j][k];
      table.entries[CooccurrenceTable::key(static_cast<WordId>(i),
                                           static_cast<WordId>(j))] =
          std::exp(dotp + c[i] + c[j]);
    }

  GloveTrainConfig config;
  config.dim = d;
  config.epochs = 300;
  config.eta = 0.1;
  config.seed = 4;
  TrainLog log;
  GloveModel model = train_glove(table, vocab, config, &log);
  CHECK(mean_weighted_factor(model, table) < 1e-3);
  CHECK(log.epoch_loss[9] < log.epoch_loss[0]);
  EmbeddingMatrix exported = export_glove_embeddings(model);
  CHECK(exported.dim == d);
  CHECK(exported.all_finite());
}

TEST_CASE("glove: training is deterministic for a fixed seed") {
  Rng rng(26);
  std::vector<std::vector<WordId>> corpus{{0, 1, 2, 3, 0, 1, 2, 3, 1, 2}};
  CooccurrenceTable table = count_cooccurrences(corpus, {.window = 2});
  Vocabulary vocab = sized_vocab(4);
  GloveTrainConfig config;
  config.dim = 4;
  config.epochs = 10;
  config.seed = 31;
  GloveModel a = train_glove(table, vocab, config);
  GloveModel b = train_glove(table, vocab, config);
  CHECK(a.main_vectors.data == b.main_vectors.data);
  CHECK(a.main_bias == b.main_bias);
}

TEST_CASE("glove: parallel counting merges shards deterministically") {
  Rng rng(27);
  std::vector<std::vector<WordId>> corpus;
  for (int s = 0; s < 40; ++s) {
    std::vector<WordId> row(6 + rng.uniform_index(8));
    for (auto& w : row) w = static_cast<WordId>(rng.uniform_index(12));
    corpus.push_back(std::move(row));
  }
  CooccurrenceTable serial = count_cooccurrences(corpus, {.window = 3});
  CooccurrenceTable parallel =
      count_cooccurrences(corpus, {.window = 3, .threads = 4});
  REQUIRE(parallel.entries.size() == serial.entries.size());
  for (const auto& [k, v] : serial.entries) CHECK(parallel.entries.at(k) == v);
}

TEST_CASE("glove: table serialization round trips sorted triples") {
  TempDir dir;
  std::vector<std::vector<WordId>> corpus{{0, 2, 1, 0, 2}};
  CooccurrenceTable table = count_cooccurrences(corpus, {.window = 2});
  const std::string path = dir.file("cooc.txt");
  save_cooccurrences(table, path);
  CooccurrenceTable back = load_cooccurrences(path);
  REQUIRE(back.entries.size() == table.entries.size());
  for (const auto& [k, x] : table.entries) CHECK(back.entries.at(k) == x);
  // sorted by (i, j)
  std::string text = read_file(path);
  CHECK(text.substr(0, 4) == "0 1 ");
}
