#pragma once

// Counter-based deterministic randomness. Every draw is a stateless hash of
// (seed, stream, counter), so the randomness consumed by sample index i
// depends only on (seed, i) and parallel runs agree with sequential ones.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gwfo/error.hpp"

namespace gwfo {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 1)) ^ mix64(b));
}

// A stream of uniforms identified by a key; `counter` is the only state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(hash2(seed, stream)) {}

  std::uint64_t next_u64() { return hash2(key_, counter_++); }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_exponential() {
    double u = next_double();
    return -std::log1p(-u);
  }

  // Poisson by inversion (sequential search). Exact for moderate means; for
  // large lambda the draw is split into pieces so the cumulative recurrence
  // stays well conditioned.
  int next_poisson(double lambda) {
    if (lambda < 0) fail("usage", "poisson mean must be nonnegative");
    if (lambda == 0) return 0;
    if (lambda > 30.0) {
      int pieces = static_cast<int>(std::ceil(lambda / 30.0));
      int total = 0;
      for (int i = 0; i < pieces; ++i) total += next_poisson_small(lambda / pieces);
      return total;
    }
    return next_poisson_small(lambda);
  }

  // index into a weight vector (weights need not be normalized)
  int next_categorical(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    double cum = 0;
    for (std::size_t j = 0; j + 1 < weights.size(); ++j) {
      cum += weights[j];
      if (u < cum) return static_cast<int>(j);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // uniform point on the probability simplex via normalized exponentials
  std::vector<double> next_simplex_point(int m) {
    std::vector<double> e(m);
    double total = 0;
    for (auto& v : e) {
      v = next_exponential();
      total += v;
    }
    for (auto& v : e) v /= total;
    return e;
  }

 private:
  int next_poisson_small(double lambda) {
    double u = next_double();
    double p = std::exp(-lambda);
    double cum = p;
    int k = 0;
    int cap = 40 + static_cast<int>(10 * lambda);  // tail below 1e-15
    while (u > cum && k < cap) {
      ++k;
      p *= lambda / k;
      cum += p;
    }
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gwfo
