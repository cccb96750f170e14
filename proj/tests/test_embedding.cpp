#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wordrep/embedding.hpp"
#include "wordrep/io_util.hpp"
#include "wordrep/representation.hpp"

using namespace wordrep;
using wordrep::testing::TempDir;

namespace {

Vocabulary toy_vocab(std::size_t n) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= i; ++k) tokens.push_back("w" + std::to_string(i));
  return build_vocabulary(tokens, 1);
}

}  // namespace

TEST_CASE("repr-core: extract_context handles both modes and boundaries") {
  const std::vector<WordId> s{0, 1, 2, 3, 4};
  CHECK(extract_context(s, 2, 1, ContextMode::SurroundingK) ==
        std::vector<WordId>{1, 3});
  const std::vector<WordId> abc{0, 1, 2};
  CHECK(extract_context(abc, 0, 5, ContextMode::SurroundingK) ==
        std::vector<WordId>{1, 2});
  CHECK(extract_context(s, 3, 2, ContextMode::PreviousK) ==
        std::vector<WordId>{1, 2});
  CHECK(extract_context(s, 0, 3, ContextMode::PreviousK).empty());
  CHECK_THROWS_AS(extract_context(s, 5, 1, ContextMode::SurroundingK),
                  std::out_of_range);
}

TEST_CASE("repr-core: context size bounds hold on random sentences") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WordId> sentence(1 + rng.uniform_index(12));
    for (auto& w : sentence) w = static_cast<WordId>(rng.uniform_index(50));
    const std::size_t m = 1 + rng.uniform_index(4);
    const std::size_t pos = rng.uniform_index(sentence.size());
    CHECK(extract_context(sentence, pos, m, ContextMode::SurroundingK).size() <=
          2 * m);
    CHECK(extract_context(sentence, pos, m, ContextMode::PreviousK).size() <= m);
  }
}

TEST_CASE("repr-core: init_embeddings is seeded and range bounded") {
  Vocabulary v = toy_vocab(12);
  EmbeddingMatrix a = init_embeddings(v, 100, 99);
  EmbeddingMatrix b = init_embeddings(v, 100, 99);
  CHECK(a.data == b.data);
  EmbeddingMatrix c = init_embeddings(v, 100, 100);
  CHECK(a.data != c.data);
  for (double x : a.data) {
    CHECK(x >= -0.005);
    CHECK(x <= 0.005);
  }
  CHECK(a.all_finite());
}

TEST_CASE("repr-core: init_embeddings empirical mean near zero") {
  std::vector<std::string> tokens;
  for (int i = 0; i < 1000; ++i) tokens.push_back("w" + std::to_string(i));
  Vocabulary v = build_vocabulary(tokens, 1);
  EmbeddingMatrix m = init_embeddings(v, 100, 5);  // > 1e5 entries
  double mean = 0.0;
  for (double x : m.data) mean += x;
  mean /= static_cast<double>(m.data.size());
  // uniform on [-a, a]: sd of the mean is a / sqrt(3 n)
  const double a = 0.5 / 100.0;
  const double sigma = a / std::sqrt(3.0 * static_cast<double>(m.data.size()));
  CHECK(std::fabs(mean) < 3.0 * sigma);
}

TEST_CASE("repr-core: embedding text format round trips") {
  TempDir dir;
  const std::string path = dir.file("vec.txt");
  write_file(path, "2 3\nfoo 1.5 -2 0.25\nbar 0 1e-3 4\n");
  EmbeddingMatrix m = load_embeddings(path);
  CHECK(m.dim == 3);
  CHECK(m.vocab.contains("foo"));
  CHECK(m.row(m.vocab.index.at("bar"))[2] == 4.0);
  // unknown type appended with a zero row
  CHECK(m.vocab.unk_id != kNoWord);
  CHECK(m.rows() == 3);

  Rng rng(17);
  Vocabulary v = toy_vocab(9);
  EmbeddingMatrix original = init_embeddings(v, 7, 31);
  for (double& x : original.data) x = rng.uniform(-3.0, 3.0);
  const std::string path2 = dir.file("round.txt");
  save_embeddings(original, path2);
  EmbeddingMatrix back = load_embeddings(path2);
  REQUIRE(back.rows() == original.rows());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < back.data.size(); ++i)
    max_diff = std::max(max_diff, std::fabs(back.data[i] - original.data[i]));
  CHECK(max_diff < 1e-8);
  CHECK(back.vocab.words == original.vocab.words);
}

TEST_CASE("repr-core: short embedding rows raise a format error with line") {
  TempDir dir;
  const std::string path = dir.file("bad.txt");
  write_file(path, "2 3\nfoo 1 2 3\nbar 1 2\n");
  try {
    load_embeddings(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("repr-core: representations are referentially transparent") {
  Vocabulary v = toy_vocab(6);
  EmbeddingMatrix m = init_embeddings(v, 4, 8);
  BrownClusterMap clusters;
  clusters.path_of["w0"] = "010";
  clusters.path_of["w1"] = "0111";

  for (const WordRepresentation& rep :
       {WordRepresentation::one_hot(v), WordRepresentation::embedding(m),
        WordRepresentation::brown(clusters)}) {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const std::string word = "w" + std::to_string(rng.uniform_index(8));
      const int offset = static_cast<int>(rng.uniform_index(5)) - 2;
      std::vector<std::string> first, second;
      rep.append_indicators(word, offset, first);
      rep.append_indicators(word, offset, second);
      CHECK(first == second);
      CHECK((!first.empty() || rep.kind == WordRepresentation::Kind::Embedding));
      CHECK(rep.dense_row_id(word) == rep.dense_row_id(word));
    }
  }
}

TEST_CASE("repr-core: one-hot indicator count independent of vocabulary size") {
  std::vector<std::string> out_small, out_big;
  WordRepresentation small = WordRepresentation::one_hot(toy_vocab(3));
  WordRepresentation big = WordRepresentation::one_hot(toy_vocab(200));
  small.append_indicators("w1", 0, out_small);
  big.append_indicators("w1", 0, out_big);
  CHECK(out_small.size() == out_big.size());
}

TEST_CASE("repr-core: sweep grid membership") {
  RepresentationConfig config;
  config.method = Method::Skipgram;
  config.dim = 50;
  config.window = 5;
  CHECK(on_sweep_grid(config));
  config.dim = 64;
  CHECK(!on_sweep_grid(config));
  config.method = Method::Brown;
  config.cluster_count = 1000;
  CHECK(on_sweep_grid(config));
  config.cluster_count = 333;
  CHECK(!on_sweep_grid(config));
}

TEST_CASE("repr-core: l2 normalization yields unit rows") {
  Vocabulary v = toy_vocab(5);
  EmbeddingMatrix m = init_embeddings(v, 6, 77);
  l2_normalize_rows(m);
  for (std::size_t w = 0; w < m.rows(); ++w) {
    auto row = m.row(static_cast<WordId>(w));
    double norm = std::sqrt(dot(row, row));
    if (norm > 0.0) CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
}
