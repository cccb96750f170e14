#pragma once

#include <cstdint>
#include <span>

#include "wordrep/embedding.hpp"
#include "wordrep/training.hpp"

namespace wordrep {

// Two-matrix predict-the-neighbourhood model. Loss factors score a target
// word against a context state h:
//   cbow:      h = mean of context input vectors, target = centre word
//   skipgram:  softmax mode pairs each context word's input vector with the
//              centre as target; sampling mode pairs the centre's input
//              vector with each context word as target
// negatives == 0 selects the exact softmax (small-vocabulary verification).
struct W2vModel {
  EmbeddingMatrix input_vectors;
  EmbeddingMatrix output_vectors;
  Method mode = Method::Cbow;
  std::size_t negatives = 5;
  double noise_power = 0.75;
};

struct W2vTrainConfig {
  Method mode = Method::Cbow;
  std::size_t dim = 50;
  std::size_t window = 5;      // m, surrounding context
  std::size_t negatives = 5;   // K; 0 trains with the exact softmax
  std::size_t epochs = 5;
  double eta0 = 0.025;
  double noise_power = 0.75;
  double subsample_threshold = 0.0;  // 0 disables frequent-word subsampling
  std::uint64_t seed = 1;
  int threads = 1;  // >1 trades determinism for speed (lost-update races)
};

// Exact -log softmax(target | context state). Skip-gram sums one factor per
// context word. Throws DomainError on an empty context.
double softmax_local_factor(const W2vModel& model, WordId w,
                            std::span<const WordId> ctx);

// -log sig(u_pos . h) - sum_k log sig(-u_k . h) with the given noise draws.
// Skip-gram sums the factor over context words, reusing the draws.
double negative_sampling_loss(const W2vModel& model, WordId w,
                              std::span<const WordId> ctx,
                              std::span<const WordId> noise_draws);

// Gradient of negative_sampling_loss over both matrices, laid out like
// input_vectors.data / output_vectors.data.
struct W2vGradient {
  std::vector<double> input;
  std::vector<double> output;
};
W2vGradient negative_sampling_loss_gradient(const W2vModel& model, WordId w,
                                            std::span<const WordId> ctx,
                                            std::span<const WordId> noise_draws);

W2vModel train_w2v(const std::vector<std::vector<WordId>>& corpus,
                   const Vocabulary& vocab, const W2vTrainConfig& config,
                   TrainLog* log = nullptr);

}  // namespace wordrep
