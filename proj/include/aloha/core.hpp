#pragma once

#include <cmath>
#include <cstddef>

#include "aloha/types.hpp"

namespace aloha {

// Default absolute tolerance for facet/boundary comparisons.
inline constexpr double kFacetTol = 1e-12;

/// Model constants for an n-user system: the all-rates-equal component
/// value m(n) = (1/n)(1-1/n)^(n-1).
struct ModelConstants {
  int n = 2;
  double m = 0.25;

  static ModelConstants make(int n) {
    if (n < 2) throw std::invalid_argument("ModelConstants: n must be >= 2");
    return ModelConstants{n, all_rates_equal_m(n)};
  }

  static double all_rates_equal_m(int n) {
    return (1.0 / n) * std::pow(1.0 - 1.0 / n, n - 1);
  }
};

inline double all_rates_equal_m(int n) { return ModelConstants::all_rates_equal_m(n); }

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s;
}

/// Product of complements: pi(p) = prod_i (1 - p_i).
inline double pi_of_p(const ContentionVector& p) {
  double prod = 1.0;
  for (double pi : p.v) prod *= (1.0 - pi);
  return prod;
}

/// Worst-case service rates x_i(p) = p_i * prod_{j != i} (1 - p_j).
inline RateVector x_of_p(const ContentionVector& p) {
  const std::size_t n = p.dim();
  RateVector x{std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    double prod = p[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) prod *= (1.0 - p[j]);
    x[i] = prod;
  }
  return x;
}

/// Control candidate p_i(delta, x) = delta*x_i / (1 + delta*x_i).
inline ContentionVector p_of_delta(double delta, const RateVector& x) {
  ContentionVector p{std::vector<double>(x.dim(), 0.0)};
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double dx = delta * x[i];
    p[i] = dx / (1.0 + dx);
  }
  return p;
}

/// Sub-stochastic test: sum(x) <= 1.
inline bool in_simplex(const RateVector& x) {
  double s = 0.0;
  for (double xi : x.v) {
    if (xi < 0.0) return false;
    s += xi;
  }
  return s <= 1.0;
}

/// Stochastic test: |sum(p) - 1| <= tol.
inline bool on_simplex_facet(const ContentionVector& p, double tol = kFacetTol) {
  return std::fabs(sum(p.v) - 1.0) <= tol;
}

}  // namespace aloha
