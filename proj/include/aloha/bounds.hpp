#pragma once

#include <vector>

#include "aloha/core.hpp"
#include "aloha/types.hpp"

namespace aloha {

enum class BoundKind { Inner, Outer };

// Slack that keeps razor-edge boundary points (vertices of P, e_i on the
// spheres/ellipsoids) robustly on the member side of the closed complements.
inline constexpr double kBoundarySlack = 1e-12;

/// Sphere centered at c*1. Inner spheres pin the all-rates-equal point on
/// the boundary (r = sqrt(n)(c-m)); outer spheres pin the unit vectors
/// (r = d(c*1, e_i)).
struct SphereParams {
  int n = 2;
  double c = 0.0;
  double r = 0.0;
  BoundKind kind = BoundKind::Inner;
};

/// Permutation-invariant ellipsoid: center c*1, one semi-axis a1 along 1,
/// the remaining n-1 semi-axes equal to a2.
struct EllipsoidParams {
  int n = 2;
  double c = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  BoundKind kind = BoundKind::Inner;
};

/// Polytope P excluded by the polyhedral outer bound, parameterized by
/// alpha(n) = (n-1)/(1/m(n) - 1).
struct PolytopeP {
  int n = 2;
  double alpha = 1.0 / 3.0;
};

double alpha_n(int n);
PolytopeP make_polytope(int n);

/// sum sqrt(x_i) <= 1.
bool in_srs(const RateVector& x);

/// Halfspace bound from the tangent hyperplane at x(p): (1-p)'x <= pi(p).
bool in_pi(const RateVector& x, const ContentionVector& p, double tol = kFacetTol);

/// Optimal halfspace bound: sum x_i <= (1-1/n)^(n-1).
bool in_pi_star(const RateVector& x);

/// Vertices of P: value alpha/(alpha+k-1) on a k-subset of coordinates,
/// k = 1..n. With include_permutations the full expanded list is returned
/// (7 vertices for n = 3); otherwise one canonical representative per k.
std::vector<RateVector> polytope_vertices(const PolytopeP& P,
                                          bool include_permutations = true);

/// x in S and outside the open polytope P.
bool in_po(const RateVector& x, const PolytopeP& P);
bool in_po(const RateVector& x);

/// Smallest valid inner-sphere center: (1 - n m^2) / (2 (1 - n m)).
double c_in_star(int n);

SphereParams sphere_params(int n, double c, BoundKind kind);

/// x in S and on or outside the sphere.
bool in_sphere_bound(const RateVector& x, const SphereParams& sp);

EllipsoidParams ellipsoid_params(int n, double c, BoundKind kind);

/// (x - c1)' R^{-1} (x - c1) evaluated in closed form:
/// (1/n)(Sigma - nc)^2 / a1^2 + (S - Sigma^2/n) / a2^2.
double quad_form(const RateVector& x, const EllipsoidParams& e);

bool in_ei(const RateVector& x, int n, double c);
bool in_eo(const RateVector& x, int n, double c);

struct Hyperplane {
  std::vector<double> normal;
  double displacement = 0.0;
};

/// Tangent hyperplane to the region boundary at x(p): normal 1-p,
/// displacement pi(p).
Hyperplane tangent_hyperplane(const ContentionVector& p, double tol = kFacetTol);

/// Rotation taking e_1 to 1/sqrt(n); columns are orthonormal.
std::vector<std::vector<double>> rotation_matrix_q(int n);

/// Squared radius of the (n-1)-ball cross-section at height x1 in the
/// rotated and shifted frame.
double cross_section_radius_sq(const EllipsoidParams& e, double x1);

/// Schur test function ftilde(p) = sqrt(gtilde(p)) + pi(p) with
/// gtilde = ((n-1)^2/n) a1^2 + (sum p_i^2 - 1/n) a2^2, for p on the facet.
double schur_tilde_f(const ContentionVector& p, const EllipsoidParams& e,
                     double tol = kFacetTol);

}  // namespace aloha
