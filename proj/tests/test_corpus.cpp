#include <doctest.h>

#include <set>

#include "test_util.hpp"
#include "wordrep/corpus.hpp"
#include "wordrep/io_util.hpp"

using namespace wordrep;
using wordrep::testing::TempDir;

TEST_CASE("corpus: normalize_digits rewrites digit runs") {
  CHECK(normalize_digits("10.20") == "NUM2.NUM2");
  CHECK(normalize_digits("abc") == "abc");
  CHECK(normalize_digits("a1b22c333") == "aNUM1bNUM2cNUM3");
  CHECK(normalize_digits("123456789012") == "NUM12");
  CHECK(normalize_digits("-") == "-");
}

TEST_CASE("corpus: normalize_digits fixed points and rewrite caveat") {
  // Digit-free strings are exactly the fixed points; any digit run leaves a
  // digit in the length rendering, so re-normalising rewrites it again.
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::string token;
    const std::size_t len = 1 + rng.uniform_index(10);
    for (std::size_t i = 0; i < len; ++i) {
      const char* alphabet = "abcXYZ-._'";
      token += alphabet[rng.uniform_index(10)];
    }
    CHECK(normalize_digits(token) == token);
    CHECK(normalize_digits(normalize_digits(token)) == normalize_digits(token));
  }
  // pinned caveat: length renderings are themselves digit runs
  CHECK(normalize_digits("NUM2.NUM2") == "NUMNUM1.NUMNUM1");
}

TEST_CASE("corpus: build_vocabulary thresholds and orders") {
  Vocabulary v = build_vocabulary(std::vector<std::string>{"a", "a", "b", "c"}, 2);
  REQUIRE(v.size() == 2);  // a + unknown
  CHECK(v.words[0] == "a");
  CHECK(v.counts[0] == 2);
  CHECK(v.words[1] == Vocabulary::kUnknownToken);
  CHECK(v.counts[1] == 2);  // b and c dropped
  CHECK(v.unk_id == 1);

  Vocabulary tie = build_vocabulary(std::vector<std::string>{"b", "a", "b", "a"}, 1);
  CHECK(tie.words[0] == "a");  // lexicographic tie-break
  CHECK(tie.words[1] == "b");
}

TEST_CASE("corpus: build_vocabulary ids are dense and indexed") {
  Rng rng(7);
  std::vector<std::string> tokens;
  // Zipf-ish synthetic corpus
  for (int i = 0; i < 1000; ++i) {
    const std::size_t r = rng.uniform_index(1000) + 1;
    tokens.push_back("w" + std::to_string(static_cast<int>(1000.0 / r)));
  }
  Vocabulary v = build_vocabulary(tokens, 1);
  std::unordered_map<std::string, long long> oracle;
  for (const auto& t : tokens) ++oracle[t];
  long long retained_total = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v.index.at(v.words[i]) == static_cast<WordId>(i));
    if (static_cast<WordId>(i) != v.unk_id) {
      CHECK(v.counts[i] == oracle.at(v.words[i]));
      retained_total += v.counts[i];
    }
  }
  CHECK(retained_total == 1000);  // min_count 1 keeps every token

  CHECK_THROWS_AS(build_vocabulary(std::vector<std::string>{}, 1), EmptyInputError);
}

TEST_CASE("corpus: build_vocabulary retained mass bounded by corpus size") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> tokens;
    const std::size_t n = 1 + rng.uniform_index(200);
    for (std::size_t i = 0; i < n; ++i)
      tokens.push_back("t" + std::to_string(rng.uniform_index(30)));
    const long long cutoff = 1 + static_cast<long long>(rng.uniform_index(4));
    Vocabulary v = build_vocabulary(tokens, cutoff);
    long long retained = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (static_cast<WordId>(i) != v.unk_id) retained += v.counts[i];
    CHECK(retained <= static_cast<long long>(n));
    if (cutoff == 1) CHECK(retained == static_cast<long long>(n));
  }
}

TEST_CASE("corpus: load_conll parses fixtures and flags bad rows") {
  TempDir dir;
  const std::string path = dir.file("data.conll");
  write_file(path,
             "The\tDT\tB-NP\n"
             "cat\tNN\tI-NP\n"
             "\n"
             "Dogs\tNNS\tB-NP\n"
             "bark\tVBP\tB-VP\n"
             "\n");
  LabelledDataset d = load_conll(path, 0, 2, {.task_kind = TaskKind::SpanIob});
  REQUIRE(d.sentence_count() == 2);
  CHECK(d.sentences[0] == std::vector<std::string>{"The", "cat"});
  CHECK(d.labels[0] == std::vector<std::string>{"B-NP", "I-NP"});
  CHECK(d.labels[1][1] == "B-VP");

  write_file(path, "The\tDT\nmissing\n");
  try {
    load_conll(path, 0, 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  write_file(path, "\n\n");
  CHECK_THROWS_AS(load_conll(path, 0, 1), EmptyInputError);
}

TEST_CASE("corpus: conll save/load round trip is the identity") {
  TempDir dir;
  Rng rng(23);
  LabelledDataset d = wordrep::testing::random_dataset(rng, 12, 6, 3);
  const std::string path = dir.file("round.conll");
  save_conll(d, path);
  LabelledDataset back = load_conll(path, 0, 1);
  CHECK(back.sentences == d.sentences);
  CHECK(back.labels == d.labels);
}

TEST_CASE("corpus: repair_iob fixes orphans and rejects junk") {
  CHECK(repair_iob(std::vector<std::string>{"O", "I-NP"}) ==
        std::vector<std::string>{"O", "B-NP"});
  const std::vector<std::string> ok{"B-NP", "I-NP", "O"};
  CHECK(repair_iob(ok) == ok);
  CHECK(repair_iob(std::vector<std::string>{"B-A", "I-B"}) ==
        std::vector<std::string>{"B-A", "B-B"});
  CHECK_THROWS_AS(repair_iob(std::vector<std::string>{"X-NP"}), ParseError);
}

TEST_CASE("corpus: repair_iob output always satisfies the validity oracle") {
  Rng rng(59);
  const std::vector<std::string> shapes{"O", "B-A", "I-A", "B-B", "I-B"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> tags;
    const std::size_t n = 1 + rng.uniform_index(12);
    for (std::size_t t = 0; t < n; ++t)
      tags.push_back(shapes[rng.uniform_index(shapes.size())]);
    std::vector<std::string> repaired = repair_iob(tags);
    CHECK(iob_sequence_valid(repaired));
    // repair only rewrites orphan continuations
    REQUIRE(repaired.size() == tags.size());
    for (std::size_t t = 0; t < n; ++t)
      if (tags[t] != repaired[t]) {
        CHECK(tags[t][0] == 'I');
        CHECK(repaired[t] == "B" + tags[t].substr(1));
      }
  }
}

TEST_CASE("corpus: vocabulary file round trip") {
  TempDir dir;
  Vocabulary v = build_vocabulary(
      std::vector<std::string>{"b", "a", "b", "c", "b", "a"}, 2);
  const std::string path = dir.file("vocab.txt");
  save_vocabulary(v, path);
  Vocabulary back = load_vocabulary(path);
  CHECK(back.words == v.words);
  CHECK(back.counts == v.counts);
  CHECK(back.unk_id == v.unk_id);
}
