#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aloha {

/// Arrival-rate vector x in R+^n (packets/slot).
struct RateVector {
  std::vector<double> v;

  RateVector() = default;
  explicit RateVector(std::vector<double> vals) : v(std::move(vals)) {}
  RateVector(std::initializer_list<double> vals) : v(vals) {}

  std::size_t dim() const { return v.size(); }
  double operator[](std::size_t i) const { return v[i]; }
  double& operator[](std::size_t i) { return v[i]; }
};

/// Contention-probability vector p in [0,1]^n.
struct ContentionVector {
  std::vector<double> v;

  ContentionVector() = default;
  explicit ContentionVector(std::vector<double> vals) : v(std::move(vals)) {}
  ContentionVector(std::initializer_list<double> vals) : v(vals) {}

  std::size_t dim() const { return v.size(); }
  double operator[](std::size_t i) const { return v[i]; }
  double& operator[](std::size_t i) { return v[i]; }
};

inline RateVector unit_rate(std::size_t n, std::size_t i) {
  RateVector e{std::vector<double>(n, 0.0)};
  e[i] = 1.0;
  return e;
}

inline ContentionVector unit_contention(std::size_t n, std::size_t i) {
  ContentionVector e{std::vector<double>(n, 0.0)};
  e[i] = 1.0;
  return e;
}

// Root finding exhausted its iteration budget.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A facet-constrained operation was given a p with sum(p) != 1.
struct NotOnFacet : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Sphere/ellipsoid center below the family minimum.
struct InvalidCenter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionTooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cross-section height outside the ellipsoid extent.
struct OutOfExtent : std::domain_error {
  using std::domain_error::domain_error;
};

// Rejection sampling could not produce the requested set members.
struct SamplingExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monte-Carlo estimate with zero hits; the CI formula is undefined.
struct DegenerateEstimate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace aloha
