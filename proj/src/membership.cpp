#include "aloha/membership.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aloha {

const char* to_string(MembershipClass c) {
  switch (c) {
    case MembershipClass::Exterior: return "Exterior";
    case MembershipClass::Boundary: return "Boundary";
    case MembershipClass::Interior: return "Interior";
  }
  return "?";
}

double eval_f(double delta, const RateVector& x) {
  double prod = 1.0;
  for (double xi : x.v) prod *= (1.0 + xi * delta);
  return prod - delta;
}

double eval_f_prime(double delta, const RateVector& x) {
  // f'(d) = prod * sum x_i/(1+x_i d) - 1; factors are positive on d >= 0.
  double prod = 1.0, ratio = 0.0;
  for (double xi : x.v) {
    const double t = 1.0 + xi * delta;
    prod *= t;
    ratio += xi / t;
  }
  return prod * ratio - 1.0;
}

namespace {

double eval_f_second(double delta, const RateVector& x) {
  double prod = 1.0, r1 = 0.0, r2 = 0.0;
  for (double xi : x.v) {
    const double t = 1.0 + xi * delta;
    const double r = xi / t;
    prod *= t;
    r1 += r;
    r2 += r * r;
  }
  return prod * (r1 * r1 - r2);
}

struct IterationBudget {
  int newton = 200;
  int bisect = 200;

  void spend_newton() {
    if (--newton < 0) throw NonConvergence("root iteration budget exhausted");
  }
  void spend_bisect() {
    if (--bisect < 0) throw NonConvergence("bisection budget exhausted");
  }
};

// Zero of a smooth function with a sign change over [lo, hi]. Newton steps
// clamped to the shrinking bracket, bisection when a step leaves it. Returns
// the abscissa with the smallest |fn| seen.
template <typename F, typename DF>
double zero_bracketed(F&& fn, DF&& dfn, double lo, double hi, double f_lo,
                      IterationBudget& budget) {
  double best_x = lo, best_f = std::fabs(f_lo);
  double x = 0.5 * (lo + hi);
  while (true) {
    const double fx = fn(x);
    if (std::fabs(fx) < best_f) {
      best_f = std::fabs(fx);
      best_x = x;
    }
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (f_lo > 0.0)) {
      lo = x;
    } else {
      hi = x;
    }
    const double width = hi - lo;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(lo) + std::fabs(hi)) ||
        width < std::numeric_limits<double>::min()) {
      return best_x;
    }
    const double d = dfn(x);
    double next = (d != 0.0) ? x - fx / d : lo;
    if (next > lo && next < hi && std::isfinite(next)) {
      budget.spend_newton();
    } else {
      next = 0.5 * (lo + hi);
      budget.spend_bisect();
    }
    x = next;
  }
}

// Residual acceptance scaled by max(1, delta): the absolute value of f at a
// large root is dominated by rounding of the product term.
bool residual_ok(double f, double delta, double tol) {
  return std::fabs(f) <= tol * std::max(1.0, std::fabs(delta));
}

}  // namespace

std::vector<double> find_positive_roots(const RateVector& x, double tol) {
  // Convex on [0, inf): f(0) = 1, f -> inf; the minimizer decides the count.
  const double slope0 = sum(x.v) - 1.0;  // f'(0)
  if (slope0 >= 0.0) {
    // Monotone increasing from f(0) = 1: no positive root.
    return {};
  }

  IterationBudget budget;

  // Bracket the minimizer of f via the sign of f'.
  double hi = 1.0;
  int doublings = 0;
  while (eval_f_prime(hi, x) < 0.0) {
    hi *= 2.0;
    if (++doublings > 2048) throw NonConvergence("minimizer bracket failed");
  }
  const double d_star = zero_bracketed(
      [&](double d) { return eval_f_prime(d, x); },
      [&](double d) { return eval_f_second(d, x); }, 0.0, hi, slope0, budget);
  const double f_star = eval_f(d_star, x);

  if (f_star > tol) return {};
  if (std::fabs(f_star) <= tol) return {d_star};

  // Two simple roots straddling the minimizer.
  IterationBudget small_budget, large_budget;
  const double root_s = zero_bracketed(
      [&](double d) { return eval_f(d, x); },
      [&](double d) { return eval_f_prime(d, x); }, 0.0, d_star, 1.0, small_budget);

  double top = std::max(2.0 * d_star, 1.0);
  doublings = 0;
  while (eval_f(top, x) < 0.0) {
    top *= 2.0;
    if (++doublings > 2048) throw NonConvergence("upper root bracket failed");
  }
  const double root_l = zero_bracketed(
      [&](double d) { return eval_f(d, x); },
      [&](double d) { return eval_f_prime(d, x); }, d_star, top, f_star, large_budget);

  if (!residual_ok(eval_f(root_s, x), root_s, tol) ||
      !residual_ok(eval_f(root_l, x), root_l, tol)) {
    throw NonConvergence("root polish did not reach tolerance");
  }
  return {root_s, root_l};
}

MembershipReport classify(const RateVector& x, double tol) {
  const std::size_t n = x.dim();
  if (n == 0) throw std::invalid_argument("classify: empty rate vector");
  for (double xi : x.v) {
    if (!(xi >= 0.0)) throw std::invalid_argument("classify: negative rate");
  }

  MembershipReport report;

  // Unit vectors are excluded from the root test; they sit on the boundary
  // with the control p = e_i.
  constexpr double kUnitTol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    bool matches = std::fabs(x[i] - 1.0) <= kUnitTol;
    for (std::size_t j = 0; matches && j < n; ++j)
      if (j != i) matches = std::fabs(x[j]) <= kUnitTol;
    if (matches) {
      report.cls = MembershipClass::Boundary;
      report.special_unit_vector = i;
      report.controls.push_back(unit_contention(n, i));
      return report;
    }
  }

  // Reduce away zero rates; controls get re-embedded afterwards.
  std::vector<std::size_t> kept;
  RateVector xr;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < kZeroRateTol) {
      report.reduced_dims.push_back(i);
    } else {
      kept.push_back(i);
      xr.v.push_back(x[i]);
    }
  }

  const auto embed = [&](const ContentionVector& pr) {
    ContentionVector p{std::vector<double>(n, 0.0)};
    for (std::size_t k = 0; k < kept.size(); ++k) p[kept[k]] = pr[k];
    return p;
  };

  if (xr.dim() == 0) {
    // The zero vector: trivially stabilizable by not contending.
    report.cls = MembershipClass::Interior;
    report.roots = {1.0};  // 1/pi(0)
    report.controls.push_back(ContentionVector{std::vector<double>(n, 0.0)});
    return report;
  }

  if (xr.dim() == 1) {
    // One effective user: f is affine in delta, so the two-root trichotomy
    // does not apply. Any rate below 1 is stabilizable (p_i = x_i), the
    // unique critical control; rates above 1 are infeasible.
    const double xi = xr[0];
    if (xi > 1.0) {
      report.cls = MembershipClass::Exterior;
      return report;
    }
    report.cls = MembershipClass::Interior;
    report.roots = {1.0 / (1.0 - xi)};
    report.controls.push_back(embed(ContentionVector{{xi}}));
    return report;
  }

  const std::vector<double> roots = find_positive_roots(xr, tol);
  report.roots = roots;
  for (double d : roots) report.controls.push_back(embed(p_of_delta(d, xr)));
  switch (roots.size()) {
    case 0: report.cls = MembershipClass::Exterior; break;
    case 1: report.cls = MembershipClass::Boundary; break;
    default: report.cls = MembershipClass::Interior; break;
  }
  return report;
}

double eval_g(double t_pi, const ContentionVector& p) {
  double prod = 1.0;
  for (double pi : p.v) prod *= (1.0 + pi * t_pi);
  return prod - (1.0 + t_pi);
}

namespace {

double eval_g_prime(double t_pi, const ContentionVector& p) {
  double prod = 1.0, ratio = 0.0;
  for (double pi : p.v) {
    const double t = 1.0 + pi * t_pi;
    prod *= t;
    ratio += pi / t;
  }
  return prod * ratio - 1.0;
}

double eval_g_second(double t_pi, const ContentionVector& p) {
  double prod = 1.0, r1 = 0.0, r2 = 0.0;
  for (double pi : p.v) {
    const double t = 1.0 + pi * t_pi;
    const double r = pi / t;
    prod *= t;
    r1 += r;
    r2 += r * r;
  }
  return prod * (r1 * r1 - r2);
}

}  // namespace

std::optional<double> transfer_root(const ContentionVector& p, double tol) {
  int nonzero = 0;
  for (double pi : p.v) {
    if (!(pi >= 0.0) || pi >= 1.0)
      throw std::invalid_argument("transfer_root: p must lie in [0,1)^n");
    if (pi > 0.0) ++nonzero;
  }
  if (nonzero < 2)
    throw std::invalid_argument("transfer_root: g is affine, no paired control exists");
  const double total = sum(p.v);
  if (std::fabs(total - 1.0) <= tol) return std::nullopt;

  const double pi_p = pi_of_p(p);
  IterationBudget budget;
  double t_root;

  if (total < 1.0) {
    // g dips below zero right of t = 0 and recovers: the root is past the
    // minimizer of g on (0, inf).
    double hi = 1.0;
    int doublings = 0;
    while (eval_g_prime(hi, p) < 0.0) {
      hi *= 2.0;
      if (++doublings > 2048) throw NonConvergence("g minimizer bracket failed");
    }
    const double t_star = zero_bracketed(
        [&](double t) { return eval_g_prime(t, p); },
        [&](double t) { return eval_g_second(t, p); }, 0.0, hi, total - 1.0, budget);
    double top = std::max(2.0 * t_star, 1.0);
    doublings = 0;
    while (eval_g(top, p) < 0.0) {
      top *= 2.0;
      if (++doublings > 2048) throw NonConvergence("g root bracket failed");
    }
    IterationBudget root_budget;
    t_root = zero_bracketed(
        [&](double t) { return eval_g(t, p); },
        [&](double t) { return eval_g_prime(t, p); }, t_star, top,
        eval_g(t_star, p), root_budget);
  } else {
    // Root in (-1, 0): g(-1) = pi(p) > 0 and the minimizer sits between.
    const double t_star = zero_bracketed(
        [&](double t) { return eval_g_prime(t, p); },
        [&](double t) { return eval_g_second(t, p); }, -1.0, 0.0,
        eval_g_prime(-1.0, p), budget);
    IterationBudget root_budget;
    t_root = zero_bracketed(
        [&](double t) { return eval_g(t, p); },
        [&](double t) { return eval_g_prime(t, p); }, -1.0, t_star, pi_p,
        root_budget);
  }

  return (1.0 + t_root) / pi_p;
}

RateVector boundary_point(const ContentionVector& p, double tol) {
  if (!on_simplex_facet(p, tol))
    throw NotOnFacet("boundary_point: sum(p) != 1");
  return x_of_p(p);
}

}  // namespace aloha
