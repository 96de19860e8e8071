// rng.hpp - deterministic random streams
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace saev {

// Thin wrapper over mt19937_64 with hand-rolled distributions so that a seed
// produces the same stream on every platform (std::*_distribution is
// implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) { return engine_() % n; }

  bool bernoulli(double p) { return uniform() < p; }

  // exponential with given rate (events per unit time)
  double exponential(double rate) {
    double u;
    do { u = uniform(); } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  // geometric on {1, 2, ...}: trials until first success
  std::uint64_t geometric(double p) {
    std::uint64_t k = 1;
    while (!bernoulli(p)) ++k;
    return k;
  }

  // pick an index from unnormalized non-negative weights
  std::size_t weighted_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      r -= weights[i];
      if (r < 0.0) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace saev
