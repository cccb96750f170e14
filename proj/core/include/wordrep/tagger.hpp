#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wordrep/features.hpp"
#include "wordrep/training.hpp"

namespace wordrep {

// A sentence after feature extraction: known indicator ids, dense slot word
// ids (so emissions track the current embedding rows under updating), and
// gold label ids when labelled.
struct EncodedSentence {
  std::vector<std::vector<int>> feature_ids;  // per position
  std::vector<std::vector<WordId>> slots;     // per position, kNoWord = boundary
  std::vector<int> gold;                      // empty when unlabelled
  std::size_t length() const { return feature_ids.size(); }
};

// First-order linear-chain model: a CRF over indicator and dense
// representation features. With update_representations the embedding rows
// inside `representation` are model parameters too.
struct TaggerModel {
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> label_index;

  std::vector<double> transition;  // Y x Y, row = previous label
  std::vector<double> start_weight;
  std::vector<double> stop_weight;

  std::vector<std::string> feature_names;
  std::unordered_map<std::string, int> feature_index;
  std::vector<double> feature_weight;  // feature id x Y

  std::vector<double> dense_weight;  // Y x dense_width
  std::size_t dense_width = 0;

  FeatureTemplateSet templates;
  WordRepresentation representation;
  TaskKind task_kind = TaskKind::TokenClassification;
  bool update_representations = false;
  bool constrained_decoding = false;

  int num_labels() const { return static_cast<int>(labels.size()); }
  double trans(int from, int to) const {
    return transition[static_cast<std::size_t>(from) * labels.size() +
                      static_cast<std::size_t>(to)];
  }

  // Feature lookup only; unseen indicators are dropped (they score zero).
  EncodedSentence encode(const std::vector<std::string>& sentence) const;
  EncodedSentence encode(const std::vector<std::string>& sentence,
                         const std::vector<std::string>& tags) const;

  // Per-label emission scores at one position.
  void emissions(const EncodedSentence& enc, std::size_t t,
                 std::span<double> out) const;
};

// sum_t emission(t, y_t) + start/stop and pairwise transitions.
double sequence_score(const TaggerModel& model, const EncodedSentence& enc,
                      std::span<const int> label_ids);
double sequence_score(const TaggerModel& model,
                      const std::vector<std::string>& sentence,
                      const std::vector<std::string>& tags);

// log sum over all labellings, forward recursion in log space.
double log_partition(const TaggerModel& model, const EncodedSentence& enc);

// Argmax labelling; ties resolved toward the lowest label id.
std::vector<int> viterbi_decode(const TaggerModel& model,
                                const EncodedSentence& enc);
std::vector<std::string> viterbi_decode(const TaggerModel& model,
                                        const std::vector<std::string>& sentence);

struct TaggerGradient {
  std::vector<double> transition, start, stop;
  std::unordered_map<int, std::vector<double>> feature;  // id -> per-label
  std::vector<double> dense;
  std::unordered_map<WordId, std::vector<double>> embedding_rows;
  double nll = 0.0;

  void add(const TaggerGradient& other);
};

// Gradient of the batch negative log-likelihood via forward-backward
// marginals; embedding-row gradients are included when with_embedding_rows.
// Throws NumericalError (naming the batch index) on non-finite intermediates.
TaggerGradient crf_gradient(const TaggerModel& model,
                            std::span<const EncodedSentence> batch,
                            bool with_embedding_rows, int threads = 1);

// Accumulated squared gradients, one slot per parameter block. The
// representation layer has its own (eta, eps) pair.
struct AdaGradState {
  double eta = 0.1;
  double eps = 1e-6;
  double eta_rep = 0.01;
  double eps_rep = 1e-6;
  std::vector<double> transition, start, stop;
  std::vector<double> feature;
  std::vector<double> dense;
  std::vector<double> embedding;

  static AdaGradState for_model(const TaggerModel& model, double eta, double eps,
                                double eta_rep, double eps_rep);
};

struct TaggerTrainConfig {
  std::size_t epochs = 10;
  double eta = 0.1;
  double eps = 1e-6;
  double eta_rep = 0.01;
  double eps_rep = 1e-6;
  double l2 = 0.0;  // strength of (l2/2)||w||^2, scaled per example
  bool update_representations = false;
  bool constrained_decoding = false;
  std::size_t batch_size = 1;
  std::uint64_t seed = 1;
  int threads = 1;  // batch-parallel gradients, deterministic reduction
};

// AdaGrad training of NLL + L2. The representation is copied into the model;
// updating never touches the caller's copy or any on-disk artifact.
TaggerModel train_tagger(const LabelledDataset& train,
                         const LabelledDataset* dev,
                         const FeatureTemplateSet& templates,
                         const WordRepresentation& representation,
                         const TaggerTrainConfig& config,
                         TrainLog* log = nullptr);

// Dev/test metric matching the task: token accuracy, or span F1 with
// predicted sequences repaired first.
double dataset_metric(const TaggerModel& model, const LabelledDataset& data);

// Versioned text checkpoint, representation embedded inline.
void save_tagger(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger(const std::string& path);

}  // namespace wordrep
