// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace scenerec {

// Deterministic PRNG with a fixed cross-platform bit stream (splitmix64).
// Every sampled artifact in the pipeline goes through this generator so that
// identical (config, seed) reruns are byte-identical regardless of the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) { return next_u64() % n; }

  int below_int(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }

  double normal(double mean = 0.0, double stddev = 1.0) {
    // Box-Muller; consumes exactly two draws per call for reproducibility.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

  double gamma(double alpha) {
    // Marsaglia-Tsang for alpha >= 1, boosted for alpha < 1.
    if (alpha < 1.0) {
      double u = uniform();
      if (u < 1e-300) u = 1e-300;
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u < 1e-300) u = 1e-300;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Symmetric Dirichlet(alpha) over k categories.
  std::vector<double> dirichlet(int k, double alpha) {
    std::vector<double> out(static_cast<size_t>(k));
    double sum = 0.0;
    for (auto& v : out) {
      v = gamma(alpha);
      sum += v;
    }
    for (auto& v : out) v /= sum;
    return out;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Weighted category draw; weights need not be normalized.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Distinct indices in [0, n), sampled without replacement.
  std::vector<int> sample_distinct(int n, int count) {
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    shuffle(idx);
    idx.resize(static_cast<size_t>(count < n ? count : n));
    return idx;
  }

  // Derives an independent stream, e.g. one per entity or per stage.
  Rng fork(uint64_t salt) {
    uint64_t s = state_ ^ (0x632be59bd9b4e019ull * (salt + 0x9e3779b97f4a7c15ull));
    Rng r(s);
    r.next_u64();
    return r;
  }

 private:
  uint64_t state_;
};

}  // namespace scenerec
