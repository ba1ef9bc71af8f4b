#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

#include "propp/errors.hpp"

namespace propp {

// splitmix64 finalizer; good avalanche, cheap, and constexpr.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Folds several values into one stream seed.  Used to derive independent
// substream seeds from (run seed, grid value, replicate index, purpose tag)
// without any coordination between call sites.
constexpr std::uint64_t seed_mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x8C2F1B7D4A93E05Bull;
  for (std::uint64_t p : parts) h = mix64(h ^ p);
  return h;
}

// Stable 64-bit key for a double; collapses -0.0 onto +0.0 so that
// numerically equal grid values seed identical streams.
inline std::uint64_t double_key(double x) {
  if (x == 0.0) x = 0.0;
  return std::bit_cast<std::uint64_t>(x);
}

// Deterministic random source.  The engine is std::mt19937_64 (its output
// sequence is fixed by the standard) and every distribution below is
// implemented here, so streams are bit-reproducible across platforms and
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); rejects exact zeros.
  double uniform_open01() {
    for (;;) {
      const double u = uniform01();
      if (u > 0.0) return u;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased integer on [0, n) by rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw InputError("uniform_below: bound must be positive");
    const std::uint64_t reject = (UINT64_MAX % n + 1) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (reject == 0 || r <= UINT64_MAX - reject) return r % n;
    }
  }

  // Standard normal via Box-Muller (one value per pair of uniforms; no
  // cached spare, which keeps the stream layout easy to reason about).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mu, double sd) { return mu + sd * normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; boost to shape >= 1 first.
  double gamma(double shape) {
    if (!(shape > 0.0))
      throw InputError("gamma: shape must be positive");
    if (shape < 1.0)
      return gamma(shape + 1.0) * std::pow(uniform_open01(), 1.0 / shape);

    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    const double s = x + y;
    return s > 0.0 ? x / s : a / (a + b);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace propp
