#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace urex {

// All stochastic components draw from this engine through the helpers below,
// so a seed fixes every run regardless of the standard library's distribution
// implementations.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const auto wide = static_cast<unsigned __int128>(rng()) * n;
  return static_cast<std::size_t>(wide >> 64);
}

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_index(rng, i)]);
  }
}

/// Sampler over a fixed discrete distribution (inverse CDF by binary search).
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(std::span<const double> weights) {
    cdf_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      acc += std::max(w, 0.0);
      cdf_.push_back(acc);
    }
    total_ = acc;
  }

  bool empty() const { return cdf_.empty() || total_ <= 0.0; }

  std::size_t operator()(Rng& rng) const {
    const double u = uniform01(rng) * total_;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(idx, cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
  double total_ = 0.0;
};

}  // namespace urex
