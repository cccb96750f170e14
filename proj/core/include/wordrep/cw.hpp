#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "wordrep/embedding.hpp"
#include "wordrep/training.hpp"

namespace wordrep {

// One-hidden-layer scorer over a (2m+1)-word window. The embedding table is
// the base vocabulary extended with a boundary type used to pad edge windows.
struct CwNetwork {
  EmbeddingMatrix embeddings;
  WordId pad_id = kNoWord;
  std::size_t window = 2;  // m words each side
  std::size_t hidden = 50;
  std::vector<double> hidden_weights;  // hidden x (2m+1)*dim, row-major
  std::vector<double> hidden_bias;     // hidden
  std::vector<double> output_weights;  // hidden
  double output_bias = 0.0;

  static constexpr const char* kBoundaryToken = "<s>";

  std::size_t arity() const { return 2 * window + 1; }
  std::size_t input_width() const { return arity() * embeddings.dim; }
};

// output(hard_tanh(hidden(concat embeddings))). Throws DomainError unless
// |window_ids| == 2m+1.
double cw_score(const CwNetwork& net, std::span<const WordId> window_ids);

// max(0, 1 - f(w) + f(w')) where w' swaps the centre word for corrupt_id.
// Throws ResampleNeeded when corrupt_id equals the centre word.
double cw_hinge_loss(const CwNetwork& net, std::span<const WordId> window_ids,
                     WordId corrupt_id);

// Full-parameter gradient of cw_hinge_loss (zero when the margin is met;
// the hinge branch is taken only for strictly positive loss).
struct CwGradient {
  std::vector<double> embeddings;  // laid out like net.embeddings.data
  std::vector<double> hidden_weights;
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;
  double output_bias = 0.0;
};
CwGradient cw_hinge_loss_gradient(const CwNetwork& net,
                                  std::span<const WordId> window_ids,
                                  WordId corrupt_id);

struct CwTrainConfig {
  std::size_t dim = 50;
  std::size_t window = 2;
  std::size_t hidden = 50;
  std::size_t epochs = 5;
  double eta0 = 0.01;
  std::uint64_t seed = 1;
  int threads = 1;
};

// Stochastic ranking training against uniformly sampled corruptions. The
// corpus is over the base vocabulary; padding rows are added internally.
CwNetwork train_cw(const std::vector<std::vector<WordId>>& corpus,
                   const Vocabulary& vocab, const CwTrainConfig& config,
                   TrainLog* log = nullptr);

// Versioned text checkpoint.
void save_cw_network(const CwNetwork& net, const std::string& path);
CwNetwork load_cw_network(const std::string& path);

}  // namespace wordrep
