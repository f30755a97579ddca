#pragma once

#include <cstdint>
#include <vector>

#include "aloha/types.hpp"

namespace aloha {

/// Fixed rate parameters for the excess-rate functions
/// f_i(p) = x_i - p_i * prod_{j != i} (1 - p_j).
struct ExcessRateContext {
  RateVector x;
  int n = 0;

  static ExcessRateContext make(RateVector rates) {
    ExcessRateContext ctx;
    ctx.n = static_cast<int>(rates.dim());
    ctx.x = std::move(rates);
    for (double xi : ctx.x.v)
      if (!(xi >= 0.0)) throw std::invalid_argument("ExcessRateContext: negative rate");
    return ctx;
  }
};

double excess_rate(const ExcessRateContext& ctx, const ContentionVector& p, int i);

/// Analytic gradient of f_i: -prod_{j!=i}(1-p_j) in coordinate i,
/// p_i * prod_{j!=i,k}(1-p_j) elsewhere.
std::vector<double> excess_grad(const ExcessRateContext& ctx, const ContentionVector& p, int i);

/// Analytic Hessian of f_i: zero diagonal, -p_i prod_{j!=k,l,i}(1-p_j) for
/// distinct (i,k,l), +prod_{j!=l,i}(1-p_j) when k = i != l.
std::vector<std::vector<double>> excess_hessian(const ExcessRateContext& ctx,
                                                const ContentionVector& p, int i);

/// p stabilizes x: every excess rate <= 0.
bool in_stabilizing_set(const ExcessRateContext& ctx, const ContentionVector& p);

struct ConvexityReport {
  long pairs = 0;
  long violations = 0;
  double worst_slack = 0.0;  // max excess seen on tested combinations
};

/// Samples member pairs of the stabilizing set (rejection sampling jittered
/// around the two critical controls, uniform fallback) and checks convex
/// combinations. Requires classify(x) = Interior.
ConvexityReport convexity_probe(const ExcessRateContext& ctx, long trials,
                                std::uint64_t seed);

struct PseudoconvexityReport {
  long samples = 0;
  long nonpositive = 0;
  double min_quadratic = 0.0;  // min q'Hq over tangent directions
};

/// Draws p in the clamped open cube and random unit q orthogonal to
/// grad f_i(p); reports min q'Hq (expected strictly positive).
PseudoconvexityReport pseudoconvexity_probe(const ExcessRateContext& ctx, int i,
                                            long trials, std::uint64_t seed);

struct SublevelReport {
  long pairs = 0;
  long violations = 0;
  double worst_slack = 0.0;  // max f_i - alpha on tested combinations
};

/// Convex-combination test on the alpha-sublevel set of f_i.
SublevelReport sublevel_probe(const ExcessRateContext& ctx, int i, double alpha_level,
                              long trials, std::uint64_t seed);

}  // namespace aloha
