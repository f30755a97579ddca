#pragma once

#include <optional>
#include <vector>

#include "aloha/core.hpp"
#include "aloha/types.hpp"

namespace aloha {

// |f| band within which the minimum counts as a boundary (single-root) case.
inline constexpr double kBoundaryTol = 1e-10;

// Components below this are treated as zero rates and dropped before the
// root test.
inline constexpr double kZeroRateTol = 1e-15;

enum class MembershipClass { Exterior, Boundary, Interior };

const char* to_string(MembershipClass c);

/// Classification of a rate vector against the region, together with the
/// positive roots of f(., x) and the critical stabilizing controls they
/// induce. Controls are re-embedded to full dimension with zeros at
/// `reduced_dims`. When two roots are present they are ascending
/// (delta_s < delta_l) and controls match the root order.
struct MembershipReport {
  MembershipClass cls = MembershipClass::Exterior;
  std::vector<double> roots;
  std::vector<ContentionVector> controls;
  std::vector<std::size_t> reduced_dims;
  std::optional<std::size_t> special_unit_vector;  // 0-based index i when x == e_i
};

/// f(delta, x) = prod_i (1 + x_i*delta) - delta.
double eval_f(double delta, const RateVector& x);

/// d/d(delta) of f(delta, x).
double eval_f_prime(double delta, const RateVector& x);

/// All positive roots of f(., x), ascending (0, 1, or 2 of them).
/// Requires every component strictly positive and x != e_i; classify()
/// performs that reduction for general inputs.
std::vector<double> find_positive_roots(const RateVector& x, double tol = kBoundaryTol);

/// Full membership test: strips zero components, handles the unit vectors,
/// and builds the report from the positive roots of f.
MembershipReport classify(const RateVector& x, double tol = kBoundaryTol);

/// g(t_pi, p) = prod_i (1 + p_i*t_pi) - (1 + t_pi).
double eval_g(double t_pi, const ContentionVector& p);

/// The nonzero root of g(., p) on (-1,0) or (0,inf), mapped to the paired
/// root of f as delta' = (1 + t') / pi(p). Empty when sum(p) = 1 within tol
/// (unique-root case).
std::optional<double> transfer_root(const ContentionVector& p, double tol = kFacetTol);

/// Boundary point x(p) for p on the probability facet.
RateVector boundary_point(const ContentionVector& p, double tol = kFacetTol);

}  // namespace aloha
