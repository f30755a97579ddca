#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "aloha/rational.hpp"
#include "aloha/types.hpp"

namespace aloha {

/// Exact region/bound volume as a reduced fraction plus its double rounding.
/// `terms` is the number of summands the producing expansion enumerated.
struct ExactVolume {
  Rational value;
  double float_value = 0.0;
  std::uint64_t terms = 0;
};

// Hamming-matrix expansion for the region volume. The summand count grows
// super-exponentially, so dimensions above kVolLambdaMaxN need force=true.
inline constexpr int kVolLambdaMaxN = 6;
ExactVolume vol_lambda_exact(int n, bool force = false);

/// Independent derivation of the same volume: direct multi-binomial
/// expansion of prod(1-p_i)^(n-2) integrated term by term over the simplex.
/// Cheaper than the Hamming route and used as its cross-check.
ExactVolume vol_lambda_oracle(int n);

/// 2^n / (2n)!.
ExactVolume vol_srs_exact(int n);

/// (1/n!) (1-1/n)^(n(n-1)).
ExactVolume vol_pi_star_exact(int n);

double normal_cdf(double x);

/// Inverse standard normal CDF: rational approximation polished with one
/// Newton step on the CDF.
double normal_quantile(double q);

/// Relative confidence half-width sqrt((1-v)/((k-1)v)) * quantile(1-alpha/2).
/// Throws DegenerateEstimate at v_hat = 0.
double ci_half_width(double v_hat, std::uint64_t k, double alpha);

struct MCEstimate {
  double v_hat = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  double delta_rel = 0.0;   // +inf when degenerate
  bool degenerate = false;  // zero hits, CI undefined
  std::uint64_t hits = 0;
};

/// Hit-fraction volume estimate over [0,1]^n. Samples are organized in
/// fixed blocks whose generators depend only on (seed, block index), so the
/// result is identical for any worker count. workers = 0 picks the hardware
/// concurrency.
MCEstimate mc_volume(const std::function<bool(const RateVector&)>& predicate, int n,
                     std::uint64_t samples, std::uint64_t seed, double alpha = 0.05,
                     int workers = 0);

/// The bound families tabulated by the CLI.
enum class Family { Lambda, Srs, PiStar, Po, SiStar, SoStar, Ei, Eo, PoAndSo };

const char* family_id(Family f);
const char* family_label(Family f);
bool family_has_exact_volume(Family f);

/// Membership predicate for a family at dimension n; c parameterizes the
/// ellipsoid families only.
std::function<bool(const RateVector&)> family_predicate(Family f, int n,
                                                        double c_ellipsoid = 2.0);

/// Exact volume for Lambda/srs/pi*; throws for MC-only families.
/// use_oracle_for_lambda switches the region volume to the cheaper
/// expansion (needed above kVolLambdaMaxN).
ExactVolume family_exact_volume(Family f, int n, bool use_oracle_for_lambda = false);

}  // namespace aloha
