#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "wordrep/embedding.hpp"
#include "wordrep/training.hpp"

namespace wordrep {

// Sparse pair-count map. Symmetric tables store both (i,j) and (j,i); counts
// may be fractional under 1/distance weighting.
struct CooccurrenceTable {
  std::unordered_map<std::uint64_t, double> entries;
  std::size_t window = 5;
  bool symmetric = true;

  static std::uint64_t key(WordId i, WordId j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
  }
  static std::pair<WordId, WordId> unkey(std::uint64_t k) {
    return {static_cast<WordId>(k >> 32),
            static_cast<WordId>(k & 0xffffffffu)};
  }

  void add(WordId i, WordId j, double weight) {
    entries[key(i, j)] += weight;
    if (symmetric && i != j) entries[key(j, i)] += weight;
  }
  double at(WordId i, WordId j) const {
    auto it = entries.find(key(i, j));
    return it == entries.end() ? 0.0 : it->second;
  }
  std::size_t size() const { return entries.size(); }
};

struct CooccurrenceConfig {
  std::size_t window = 5;
  bool symmetric = true;
  bool distance_weighting = false;  // weight 1/d instead of 1
  int threads = 1;
};

// Scans each position and credits every neighbour within the window. For a
// symmetric table each co-occurrence event lands on both ordered entries.
CooccurrenceTable count_cooccurrences(
    const std::vector<std::vector<WordId>>& corpus,
    const CooccurrenceConfig& config = {});

// Lines "i j count" sorted by (i, j).
void save_cooccurrences(const CooccurrenceTable& table, const std::string& path);
CooccurrenceTable load_cooccurrences(const std::string& path);

// Saturating weight (x/x_max)^alpha, capped at 1. Throws DomainError on x <= 0.
double glove_weight(double x, double x_max, double alpha);

struct GloveModel {
  EmbeddingMatrix main_vectors;
  EmbeddingMatrix context_vectors;
  std::vector<double> main_bias;
  std::vector<double> context_bias;
  double x_max = 100.0;
  double alpha = 0.75;
};

// g(x) (v_i . v_j + b_i + b_j - ln x)^2
double glove_local_factor(const GloveModel& model, WordId i, WordId j,
                          double x_ij);

struct GloveFactorGradient {
  std::vector<double> main_i;
  std::vector<double> context_j;
  double bias_i = 0.0;
  double bias_j = 0.0;
};
GloveFactorGradient glove_local_factor_gradient(const GloveModel& model,
                                                WordId i, WordId j,
                                                double x_ij);

struct GloveTrainConfig {
  std::size_t dim = 50;
  std::size_t epochs = 25;
  double eta = 0.05;
  double eps = 1e-8;  // AdaGrad stabiliser
  double x_max = 100.0;
  double alpha = 0.75;
  std::uint64_t seed = 1;
  int threads = 1;
};

GloveModel train_glove(const CooccurrenceTable& table, const Vocabulary& vocab,
                       const GloveTrainConfig& config, TrainLog* log = nullptr);

// Mean of g(x) r^2 over stored entries; the quantity train_glove minimises.
double mean_weighted_factor(const GloveModel& model,
                            const CooccurrenceTable& table);

// Exported vectors are the sum of main and context rows.
EmbeddingMatrix export_glove_embeddings(const GloveModel& model);

}  // namespace wordrep
