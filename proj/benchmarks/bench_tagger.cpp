#include <benchmark/benchmark.h>

#include "wordrep/rng.hpp"
#include "wordrep/tagger.hpp"

namespace {

using namespace wordrep;

struct TaggerFixture {
  TaggerModel model;
  std::vector<EncodedSentence> batch;

  TaggerFixture(std::size_t sentence_len, int labels, bool dense) {
    Rng rng(42);
    LabelledDataset data;
    for (int s = 0; s < 8; ++s) {
      std::vector<std::string> sentence, tags;
      for (std::size_t t = 0; t < sentence_len; ++t) {
        sentence.push_back("tok" + std::to_string(rng.uniform_index(200)));
        tags.push_back("L" + std::to_string(rng.uniform_index(labels)));
      }
      data.sentences.push_back(std::move(sentence));
      data.labels.push_back(std::move(tags));
    }
    WordRepresentation rep;
    if (dense) {
      std::vector<std::string> tokens;
      for (int i = 0; i < 200; ++i) tokens.push_back("tok" + std::to_string(i));
      EmbeddingMatrix m = init_embeddings(build_vocabulary(tokens, 1), 50, 7);
      rep = WordRepresentation::embedding(std::move(m));
    } else {
      rep = WordRepresentation::one_hot(build_vocabulary(data.sentences, 1));
    }
    TaggerTrainConfig config;
    config.epochs = 0;
    model = train_tagger(data, nullptr, FeatureTemplateSet::all(), rep, config);
    for (double& w : model.transition) w = rng.uniform(-1.0, 1.0);
    for (double& w : model.feature_weight) w = rng.uniform(-1.0, 1.0);
    for (double& w : model.dense_weight) w = rng.uniform(-1.0, 1.0);
    for (std::size_t s = 0; s < data.sentence_count(); ++s)
      batch.push_back(model.encode(data.sentences[s], data.labels[s]));
  }
};

void BM_viterbi(benchmark::State& state) {
  TaggerFixture fixture(static_cast<std::size_t>(state.range(0)), 10, false);
  for (auto _ : state)
    for (const auto& enc : fixture.batch)
      benchmark::DoNotOptimize(viterbi_decode(fixture.model, enc));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(fixture.batch.size()));
}
BENCHMARK(BM_viterbi)->Arg(10)->Arg(40);

void BM_log_partition(benchmark::State& state) {
  TaggerFixture fixture(static_cast<std::size_t>(state.range(0)), 10, false);
  for (auto _ : state)
    for (const auto& enc : fixture.batch)
      benchmark::DoNotOptimize(log_partition(fixture.model, enc));
}
BENCHMARK(BM_log_partition)->Arg(10)->Arg(40);

void BM_crf_gradient_sparse(benchmark::State& state) {
  TaggerFixture fixture(20, 8, false);
  for (auto _ : state)
    benchmark::DoNotOptimize(crf_gradient(fixture.model, fixture.batch, false));
}
BENCHMARK(BM_crf_gradient_sparse);

void BM_crf_gradient_dense_updating(benchmark::State& state) {
  TaggerFixture fixture(20, 8, true);
  fixture.model.update_representations = true;
  for (auto _ : state)
    benchmark::DoNotOptimize(crf_gradient(fixture.model, fixture.batch, true));
}
BENCHMARK(BM_crf_gradient_dense_updating);

}  // namespace
