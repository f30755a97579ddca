#include "aloha/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace aloha {

double alpha_n(int n) {
  const double m = all_rates_equal_m(n);
  return (n - 1) / (1.0 / m - 1.0);
}

PolytopeP make_polytope(int n) {
  if (n < 2) throw std::invalid_argument("make_polytope: n must be >= 2");
  return PolytopeP{n, alpha_n(n)};
}

bool in_srs(const RateVector& x) {
  double s = 0.0;
  for (double xi : x.v) {
    if (xi < 0.0) return false;
    s += std::sqrt(xi);
  }
  return s <= 1.0;
}

bool in_pi(const RateVector& x, const ContentionVector& p, double tol) {
  if (!on_simplex_facet(p, tol)) throw NotOnFacet("in_pi: sum(p) != 1");
  for (double xi : x.v)
    if (xi < 0.0) return false;
  double lhs = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) lhs += (1.0 - p[i]) * x[i];
  return lhs <= pi_of_p(p);
}

bool in_pi_star(const RateVector& x) {
  double s = 0.0;
  for (double xi : x.v) {
    if (xi < 0.0) return false;
    s += xi;
  }
  const int n = static_cast<int>(x.dim());
  return s <= std::pow(1.0 - 1.0 / n, n - 1);
}

std::vector<RateVector> polytope_vertices(const PolytopeP& P, bool include_permutations) {
  const int n = P.n;
  std::vector<RateVector> out;
  for (int k = 1; k <= n; ++k) {
    const double value = P.alpha / (P.alpha + (k - 1));
    if (!include_permutations) {
      RateVector v{std::vector<double>(n, 0.0)};
      for (int i = 0; i < k; ++i) v[i] = value;
      out.push_back(std::move(v));
      continue;
    }
    // All k-subsets of [n], lexicographic.
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      RateVector v{std::vector<double>(n, 0.0)};
      for (int i : idx) v[i] = value;
      out.push_back(std::move(v));
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

bool in_po(const RateVector& x, const PolytopeP& P) {
  double s = 0.0;
  for (double xi : x.v) {
    if (xi < 0.0) return false;
    s += xi;
  }
  if (s > 1.0) return false;  // outside S
  // Member iff outside the open polytope; points on bd(P) stay in the bound
  // so that the touching boundary points of the region are not excluded.
  bool interior = s < 1.0 - kBoundarySlack;
  for (std::size_t i = 0; interior && i < x.dim(); ++i) {
    if (!(x[i] > kBoundarySlack)) interior = false;
  }
  for (std::size_t i = 0; interior && i < x.dim(); ++i) {
    const double h = x[i] + (s - x[i]) / P.alpha;
    if (!(h > 1.0 + kBoundarySlack)) interior = false;
  }
  return !interior;
}

bool in_po(const RateVector& x) {
  return in_po(x, make_polytope(static_cast<int>(x.dim())));
}

double c_in_star(int n) {
  const double m = all_rates_equal_m(n);
  return (1.0 - n * m * m) / (2.0 * (1.0 - n * m));
}

SphereParams sphere_params(int n, double c, BoundKind kind) {
  if (n < 2) throw std::invalid_argument("sphere_params: n must be >= 2");
  if (kind == BoundKind::Inner) {
    const double cmin = c_in_star(n);
    if (c < cmin - 1e-15) throw InvalidCenter("sphere_params: inner spheres need c >= c_in*");
    return SphereParams{n, c, std::sqrt(static_cast<double>(n)) * (c - all_rates_equal_m(n)),
                        kind};
  }
  if (c < 1.0 - 1e-15) throw InvalidCenter("sphere_params: outer spheres need c >= 1");
  return SphereParams{n, c, std::sqrt((c - 1.0) * (c - 1.0) + (n - 1) * c * c), kind};
}

bool in_sphere_bound(const RateVector& x, const SphereParams& sp) {
  if (!in_simplex(x)) return false;
  double d2 = 0.0;
  for (double xi : x.v) d2 += (xi - sp.c) * (xi - sp.c);
  // Radius squared in closed form so that the pinned points (m*1, e_i)
  // compare exactly rather than through a sqrt round trip.
  const double r2 = (sp.kind == BoundKind::Inner)
                        ? sp.n * (sp.c - all_rates_equal_m(sp.n)) * (sp.c - all_rates_equal_m(sp.n))
                        : (sp.c - 1.0) * (sp.c - 1.0) + (sp.n - 1) * sp.c * sp.c;
  return d2 >= r2 * (1.0 - kBoundarySlack) - kBoundarySlack;
}

namespace {

EllipsoidParams ellipsoid_params_unchecked(int n, double c, BoundKind kind) {
  if (kind == BoundKind::Outer) {
    return EllipsoidParams{n, c, std::sqrt((n * c - 1.0) * c), std::sqrt((n - 1) * c), kind};
  }
  const double a1 = std::sqrt(static_cast<double>(n)) * (c - all_rates_equal_m(n));
  const double denom = n * a1 * a1 - (n * c - 1.0) * (n * c - 1.0);
  if (denom <= 0.0) throw InvalidCenter("ellipsoid_params: degenerate inner axis");
  return EllipsoidParams{n, c, a1, std::sqrt((n - 1) * a1 * a1 / denom), kind};
}

}  // namespace

EllipsoidParams ellipsoid_params(int n, double c, BoundKind kind) {
  if (n < 2) throw std::invalid_argument("ellipsoid_params: n must be >= 2");
  if (!(c > 1.0 / n)) throw InvalidCenter("ellipsoid_params: need c > 1/n");
  return ellipsoid_params_unchecked(n, c, kind);
}

double quad_form(const RateVector& x, const EllipsoidParams& e) {
  double sigma = 0.0, sq = 0.0;
  for (double xi : x.v) {
    sigma += xi;
    sq += xi * xi;
  }
  const double n = static_cast<double>(e.n);
  const double axial = (sigma - n * e.c);
  return axial * axial / (n * e.a1 * e.a1) + (sq - sigma * sigma / n) / (e.a2 * e.a2);
}

bool in_ei(const RateVector& x, int n, double c) {
  if (!in_simplex(x)) return false;
  return quad_form(x, ellipsoid_params(n, c, BoundKind::Inner)) >= 1.0 - kBoundarySlack;
}

bool in_eo(const RateVector& x, int n, double c) {
  if (!in_simplex(x)) return false;
  return quad_form(x, ellipsoid_params(n, c, BoundKind::Outer)) >= 1.0 - kBoundarySlack;
}

Hyperplane tangent_hyperplane(const ContentionVector& p, double tol) {
  if (!on_simplex_facet(p, tol)) throw NotOnFacet("tangent_hyperplane: sum(p) != 1");
  Hyperplane h;
  h.normal.resize(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) h.normal[i] = 1.0 - p[i];
  h.displacement = pi_of_p(p);
  return h;
}

std::vector<std::vector<double>> rotation_matrix_q(int n) {
  if (n < 2) throw std::invalid_argument("rotation_matrix_q: n must be >= 2");
  const double rn = std::sqrt(static_cast<double>(n));
  const double off = -1.0 / rn + 1.0 / (1.0 + rn);
  std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) q[i][0] = 1.0 / rn;
  for (int j = 1; j < n; ++j) q[0][j] = -1.0 / rn;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) q[i][j] = (i == j) ? 1.0 + off : off;
  return q;
}

double cross_section_radius_sq(const EllipsoidParams& e, double x1) {
  const double shift = std::sqrt(static_cast<double>(e.n)) * (e.c - 1.0 / e.n);
  const double t = 1.0 - (x1 - shift) * (x1 - shift) / (e.a1 * e.a1);
  if (t < 0.0) throw OutOfExtent("cross_section_radius_sq: x1 beyond axis extent");
  return e.a2 * e.a2 * t;
}

double schur_tilde_f(const ContentionVector& p, const EllipsoidParams& e, double tol) {
  if (!on_simplex_facet(p, tol)) throw NotOnFacet("schur_tilde_f: sum(p) != 1");
  const double n = static_cast<double>(e.n);
  double sq = 0.0;
  for (double pi : p.v) sq += pi * pi;
  double gt = (n - 1.0) * (n - 1.0) / n * e.a1 * e.a1 + (sq - 1.0 / n) * e.a2 * e.a2;
  if (gt < 0.0) gt = 0.0;  // roundoff when a1 = 0 and p is uniform
  return std::sqrt(gt) + pi_of_p(p);
}

}  // namespace aloha
