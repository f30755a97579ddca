#pragma once

#include <cmath>
#include <cstdint>

#include "aloha/types.hpp"

namespace aloha {

/// SplitMix64 generator (Steele et al.). 64-bit state, seedable, and
/// splittable: independent streams are derived by mixing (seed, stream id),
/// which is what the Monte-Carlo block scheme and the probe suites rely on
/// for run-to-run and worker-count-independent reproducibility.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double next_gaussian() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
  }

  /// Disjoint stream keyed by (seed, stream_id).
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ull * (stream_id + 1)));
    SplitMix64 out(mixer.next());
    return out;
  }
};

inline RateVector sample_cube(int n, SplitMix64& rng) {
  RateVector x{std::vector<double>(n, 0.0)};
  for (int i = 0; i < n; ++i) x[i] = rng.next_double();
  return x;
}

/// Uniform over the open solid simplex {p > 0, sum p < 1} via exponential
/// spacings (n+1 exponentials, normalized, last coordinate dropped).
inline ContentionVector sample_simplex_interior(int n, SplitMix64& rng) {
  std::vector<double> e(n + 1);
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    double u = rng.next_double();
    while (u <= 0.0) u = rng.next_double();
    e[i] = -std::log(u);
    total += e[i];
  }
  ContentionVector p{std::vector<double>(n, 0.0)};
  for (int i = 0; i < n; ++i) p[i] = e[i] / total;
  return p;
}

/// Uniform over the probability facet {p >= 0, sum p = 1}.
inline ContentionVector sample_facet(int n, SplitMix64& rng) {
  std::vector<double> e(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_double();
    while (u <= 0.0) u = rng.next_double();
    e[i] = -std::log(u);
    total += e[i];
  }
  ContentionVector p{std::vector<double>(n, 0.0)};
  for (int i = 0; i < n; ++i) p[i] = e[i] / total;
  return p;
}

}  // namespace aloha
