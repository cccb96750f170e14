#pragma once

#include <vector>

namespace wordrep {

// Per-epoch progress collected by the trainers.
struct TrainLog {
  std::vector<double> epoch_loss;  // mean loss per local factor
  std::vector<double> dev_metric;  // tagger training only, empty otherwise
  bool degenerate = false;         // e.g. an all-unknown corpus
};

// Linear decay from eta0 down to eta0/100 across all scheduled steps.
inline double decayed_eta(double eta0, std::size_t step, std::size_t total_steps) {
  if (total_steps == 0) return eta0;
  double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  if (frac > 1.0) frac = 1.0;
  return eta0 * (1.0 - 0.99 * frac);
}

}  // namespace wordrep
