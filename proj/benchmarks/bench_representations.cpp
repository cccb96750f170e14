#include <benchmark/benchmark.h>

#include "wordrep/brown.hpp"
#include "wordrep/glove.hpp"
#include "wordrep/rng.hpp"
#include "wordrep/word2vec.hpp"

namespace {

using namespace wordrep;

std::vector<std::vector<WordId>> zipfish_corpus(std::size_t tokens,
                                                std::size_t vocab) {
  Rng rng(3);
  std::vector<double> weights(vocab);
  for (std::size_t i = 0; i < vocab; ++i)
    weights[i] = 1.0 / static_cast<double>(i + 1);
  DiscreteSampler sampler(weights);
  std::vector<std::vector<WordId>> corpus;
  std::vector<WordId> sentence;
  for (std::size_t t = 0; t < tokens; ++t) {
    sentence.push_back(static_cast<WordId>(sampler.sample(rng)));
    if (sentence.size() == 18) {
      corpus.push_back(std::move(sentence));
      sentence.clear();
    }
  }
  if (!sentence.empty()) corpus.push_back(std::move(sentence));
  return corpus;
}

Vocabulary vocab_for(const std::vector<std::vector<WordId>>& corpus,
                     std::size_t vocab) {
  std::vector<std::string> tokens;
  for (const auto& s : corpus)
    for (WordId w : s) tokens.push_back("w" + std::to_string(w));
  (void)vocab;
  return build_vocabulary(tokens, 1);
}

void BM_count_cooccurrences(benchmark::State& state) {
  auto corpus = zipfish_corpus(50000, 500);
  for (auto _ : state) {
    CooccurrenceConfig config;
    config.window = static_cast<std::size_t>(state.range(0));
    benchmark::DoNotOptimize(count_cooccurrences(corpus, config));
  }
  state.SetItemsProcessed(state.iterations() * 50000);
}
BENCHMARK(BM_count_cooccurrences)->Arg(5)->Arg(10);

void BM_negative_sampling_gradient(benchmark::State& state) {
  Rng rng(9);
  std::vector<std::string> tokens;
  for (int i = 0; i < 1000; ++i) tokens.push_back("w" + std::to_string(i));
  Vocabulary vocab = build_vocabulary(tokens, 1);
  W2vModel model;
  model.mode = Method::Skipgram;
  model.input_vectors = init_embeddings(vocab, 100, 1);
  model.output_vectors = init_embeddings(vocab, 100, 2);
  const std::vector<WordId> ctx{3, 17, 256, 801};
  const std::vector<WordId> noise{5, 99, 421, 700, 950};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        negative_sampling_loss_gradient(model, 42, ctx, noise));
}
BENCHMARK(BM_negative_sampling_gradient);

void BM_glove_epoch(benchmark::State& state) {
  auto corpus = zipfish_corpus(50000, 300);
  Vocabulary vocab = vocab_for(corpus, 300);
  auto ids = corpus_to_ids(
      [&] {
        Sentences text;
        for (const auto& s : corpus) {
          std::vector<std::string> row;
          for (WordId w : s) row.push_back("w" + std::to_string(w));
          text.push_back(std::move(row));
        }
        return text;
      }(),
      vocab);
  CooccurrenceTable table = count_cooccurrences(ids, {.window = 5});
  for (auto _ : state) {
    GloveTrainConfig config;
    config.dim = 50;
    config.epochs = 1;
    benchmark::DoNotOptimize(train_glove(table, vocab, config));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(table.size()));
}
BENCHMARK(BM_glove_epoch);

void BM_brown_cluster(benchmark::State& state) {
  auto corpus = zipfish_corpus(20000, static_cast<std::size_t>(state.range(0)));
  Vocabulary vocab = vocab_for(corpus, static_cast<std::size_t>(state.range(0)));
  auto remapped = corpus;
  for (auto& s : remapped)
    for (auto& w : s)
      w = vocab.index.at("w" + std::to_string(w));
  BigramStatistics stats =
      BigramStatistics::from_corpus(remapped, vocab.size());
  for (auto _ : state)
    benchmark::DoNotOptimize(brown_cluster(stats, 20));
}
BENCHMARK(BM_brown_cluster)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
