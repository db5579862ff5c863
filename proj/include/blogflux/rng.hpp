// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace blogflux {

// Seeded random stream. Every draw is derived from std::mt19937_64 raw output
// with hand-written transforms, so sequences are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Unbiased integer in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  double exponential(double mean) { return -mean * std::log(uniform_open()); }

  // Box-Muller; consumes two uniforms per call.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda > 60.0) {
      const double x = std::round(normal(lambda, std::sqrt(lambda)));
      return x < 0.0 ? 0 : static_cast<std::uint64_t>(x);
    }
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = uniform_open();
    while (p > limit) {
      ++k;
      p *= uniform_open();
    }
    return k;
  }

  // Symmetric Dirichlet(1) draw of length k.
  std::vector<double> dirichlet_ones(std::size_t k) {
    std::vector<double> out(k);
    double total = 0.0;
    for (auto& v : out) {
      v = -std::log(uniform_open());
      total += v;
    }
    for (auto& v : out) v /= total;
    return out;
  }

  // Index drawn proportionally to non-negative weights (at least one positive).
  std::size_t categorical(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    return 0;
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

  // Independent child stream; consumes one draw from this stream.
  Rng fork() { return Rng(mix(engine_())); }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace blogflux
