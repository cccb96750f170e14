#pragma once

#include <cmath>
#include <span>

namespace wordrep {

// Elementwise G += g^2; theta -= eta * g / (sqrt(G) + eps).
inline void adagrad_step(std::span<double> params, std::span<const double> grads,
                         std::span<double> accum, double eta, double eps) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (g == 0.0) continue;
    accum[i] += g * g;
    params[i] -= eta * g / (std::sqrt(accum[i]) + eps);
  }
}

// Single-coordinate form for sparse updates.
inline void adagrad_step(double& param, double grad, double& accum, double eta,
                         double eps) {
  if (grad == 0.0) return;
  accum += grad * grad;
  param -= eta * grad / (std::sqrt(accum) + eps);
}

}  // namespace wordrep
