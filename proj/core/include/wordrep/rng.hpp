#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wordrep/errors.hpp"

namespace wordrep {

// Seeded random source. All derived values are computed from raw mt19937_64
// words with fixed arithmetic, so a given seed yields the same stream on any
// platform -- std::uniform_*_distribution is not portable, hence avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased uniform index in [0, n) via rejection.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw DomainError("uniform_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<std::size_t>(x % n);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Samples indices proportionally to fixed non-negative weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights) {
    cumulative_.reserve(weights.size());
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw DomainError("DiscreteSampler: negative weight");
      total += w;
      cumulative_.push_back(total);
    }
    if (cumulative_.empty() || total <= 0.0)
      throw DomainError("DiscreteSampler: no positive weight");
  }

  std::size_t sample(Rng& rng) const {
    double u = rng.uniform() * cumulative_.back();
    std::size_t lo = 0, hi = cumulative_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cumulative_[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace wordrep
