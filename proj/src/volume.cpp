#include "aloha/volume.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "aloha/bounds.hpp"
#include "aloha/membership.hpp"
#include "aloha/rng.hpp"

namespace aloha {

namespace {

ExactVolume make_exact(Rational r, std::uint64_t terms) {
  ExactVolume out;
  out.value = std::move(r);
  out.float_value = out.value.to_double();
  out.terms = terms;
  return out;
}

// Shared state for the Hamming-matrix enumeration: multisets of size n-2
// over the 2^n binary columns, visited in non-decreasing column order.
struct LambdaSum {
  int n;
  int budget;                       // n - 2
  std::vector<int> col_bits;        // popcount per column
  std::vector<BigInt> small_fact;   // k! for small k
  std::vector<BigInt> tail_ratio;   // N! / (n+1+s)! for s = 0..n*(n-2)
  BigInt common_den;                // N!
  BigInt total = 0;
  std::uint64_t terms = 0;
  std::vector<int> alpha;           // bit counts accumulated over chosen columns

  explicit LambdaSum(int n_) : n(n_), budget(n_ - 2), alpha(n_, 0) {
    const int cols = 1 << n;
    col_bits.resize(cols);
    for (int t = 0; t < cols; ++t) col_bits[t] = __builtin_popcount(static_cast<unsigned>(t));
    const int max_sum = n * budget;
    const int big_n = n + 1 + max_sum;
    common_den = factorial_big(big_n);
    tail_ratio.resize(max_sum + 1);
    BigInt r = 1;
    tail_ratio[max_sum] = 1;
    for (int s = max_sum - 1; s >= 0; --s) {
      r *= (n + 1 + s + 1);
      tail_ratio[s] = r;
    }
    small_fact.resize(budget + 1);
    for (int k = 0; k <= budget; ++k) small_fact[k] = factorial_big(k);
  }

  // remaining: columns still to pick; min_col: smallest admissible column;
  // run: multiplicity of the column currently being extended; denom: product
  // of k_t! over completed runs.
  void recurse(int remaining, int min_col, int run, BigInt denom, int alpha_sum) {
    if (remaining == 0) {
      denom *= small_fact[run];
      BigInt term = small_fact[budget] / denom;  // multinomial coefficient
      for (int i = 0; i < n; ++i) term *= small_fact[alpha[i]];
      term *= tail_ratio[alpha_sum];
      if (alpha_sum & 1)
        total -= term;
      else
        total += term;
      ++terms;
      return;
    }
    const int cols = 1 << n;
    for (int t = min_col; t < cols; ++t) {
      for (int i = 0; i < n; ++i)
        if (t & (1 << i)) ++alpha[i];
      const int next_run = (t == min_col && run > 0) ? run + 1 : 1;
      BigInt next_denom = denom;
      if (t != min_col && run > 0) next_denom *= small_fact[run];
      recurse(remaining - 1, t, next_run, next_denom, alpha_sum + col_bits[t]);
      for (int i = 0; i < n; ++i)
        if (t & (1 << i)) --alpha[i];
    }
  }
};

}  // namespace

ExactVolume vol_lambda_exact(int n, bool force) {
  if (n < 2) throw std::invalid_argument("vol_lambda_exact: n must be >= 2");
  if (n > kVolLambdaMaxN && !force)
    throw DimensionTooLarge("vol_lambda_exact: summand count is prohibitive; pass force");
  if (n == 2) {
    // Budget zero: the single empty multiset.
    return make_exact(Rational(BigInt(1), BigInt(6)), 1);
  }
  LambdaSum sum(n);
  sum.recurse(sum.budget, 0, 0, BigInt(1), 0);
  return make_exact(Rational(sum.total, sum.common_den), sum.terms);
}

ExactVolume vol_lambda_oracle(int n) {
  if (n < 2 || n > 8) throw std::invalid_argument("vol_lambda_oracle: supported for 2 <= n <= 8");
  const int e = n - 2;
  const int max_sum = n * e;
  const BigInt common_den = factorial_big(n + 1 + max_sum);
  std::vector<BigInt> tail_ratio(max_sum + 1);
  {
    BigInt r = 1;
    tail_ratio[max_sum] = 1;
    for (int s = max_sum - 1; s >= 0; --s) {
      r *= (n + 1 + s + 1);
      tail_ratio[s] = r;
    }
  }
  // Per-exponent weight C(e, a) * a! = e! / (e-a)!, the falling factorial.
  std::vector<BigInt> weight(e + 1);
  for (int a = 0; a <= e; ++a) weight[a] = factorial_big(e) / factorial_big(e - a);

  BigInt total = 0;
  std::uint64_t terms = 0;
  std::vector<int> expo(n, 0);
  // Odometer over {0..e}^n.
  while (true) {
    BigInt term = 1;
    int s = 0;
    for (int i = 0; i < n; ++i) {
      term *= weight[expo[i]];
      s += expo[i];
    }
    term *= tail_ratio[s];
    if (s & 1)
      total -= term;
    else
      total += term;
    ++terms;
    int pos = 0;
    while (pos < n && expo[pos] == e) expo[pos++] = 0;
    if (pos == n) break;
    ++expo[pos];
  }
  return make_exact(Rational(total, common_den), terms);
}

ExactVolume vol_srs_exact(int n) {
  if (n < 2) throw std::invalid_argument("vol_srs_exact: n must be >= 2");
  BigInt num = BigInt(1) << n;
  return make_exact(Rational(num, factorial_big(2 * n)), 1);
}

ExactVolume vol_pi_star_exact(int n) {
  if (n < 2) throw std::invalid_argument("vol_pi_star_exact: n must be >= 2");
  const int e = n * (n - 1);
  BigInt num = boost::multiprecision::pow(BigInt(n - 1), e);
  BigInt den = factorial_big(n) * boost::multiprecision::pow(BigInt(n), e);
  return make_exact(Rational(num, den), 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("normal_quantile: q must be in (0,1)");

  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (q < p_low) {
    const double u = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (q <= 1.0 - p_low) {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - q));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }

  // One Newton step on the CDF.
  const double pdf = std::exp(-0.5 * x * x) / 2.50662827463100050242;  // sqrt(2*pi)
  if (pdf > 0.0) x -= (normal_cdf(x) - q) / pdf;
  return x;
}

double ci_half_width(double v_hat, std::uint64_t k, double alpha) {
  if (k < 2) throw std::invalid_argument("ci_half_width: need k >= 2");
  if (!(v_hat > 0.0)) throw DegenerateEstimate("ci_half_width: undefined at v_hat = 0");
  if (v_hat >= 1.0) return 0.0;
  return std::sqrt((1.0 - v_hat) / ((static_cast<double>(k) - 1.0) * v_hat)) *
         normal_quantile(1.0 - alpha / 2.0);
}

namespace {

constexpr std::uint64_t kMcBlock = 8192;

}  // namespace

MCEstimate mc_volume(const std::function<bool(const RateVector&)>& predicate, int n,
                     std::uint64_t samples, std::uint64_t seed, double alpha, int workers) {
  if (samples < 2) throw std::invalid_argument("mc_volume: need samples >= 2");
  if (n < 1) throw std::invalid_argument("mc_volume: need n >= 1");

  const std::uint64_t blocks = (samples + kMcBlock - 1) / kMcBlock;
  std::vector<std::uint64_t> block_hits(blocks, 0);

  int nworkers = workers > 0 ? workers
                             : static_cast<int>(std::thread::hardware_concurrency());
  if (nworkers < 1) nworkers = 1;
  if (static_cast<std::uint64_t>(nworkers) > blocks) nworkers = static_cast<int>(blocks);

  std::atomic<std::uint64_t> next_block{0};
  auto run = [&]() {
    RateVector x{std::vector<double>(n, 0.0)};
    while (true) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= blocks) return;
      SplitMix64 rng = SplitMix64::stream(seed, b);
      const std::uint64_t lo = b * kMcBlock;
      const std::uint64_t hi = std::min(lo + kMcBlock, samples);
      std::uint64_t hits = 0;
      for (std::uint64_t s = lo; s < hi; ++s) {
        for (int i = 0; i < n; ++i) x[i] = rng.next_double();
        if (predicate(x)) ++hits;
      }
      block_hits[b] = hits;
    }
  };

  if (nworkers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }

  std::uint64_t hits = 0;
  for (std::uint64_t h : block_hits) hits += h;

  MCEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.alpha = alpha;
  est.hits = hits;
  est.v_hat = static_cast<double>(hits) / static_cast<double>(samples);
  if (hits == 0) {
    est.degenerate = true;
    est.delta_rel = std::numeric_limits<double>::infinity();
  } else {
    est.delta_rel = ci_half_width(est.v_hat, samples, alpha);
  }
  return est;
}

const char* family_id(Family f) {
  switch (f) {
    case Family::Lambda: return "lambda";
    case Family::Srs: return "srs";
    case Family::PiStar: return "pi_star";
    case Family::Po: return "po";
    case Family::SiStar: return "si_star";
    case Family::SoStar: return "so_star";
    case Family::Ei: return "ei";
    case Family::Eo: return "eo";
    case Family::PoAndSo: return "po_and_so";
  }
  return "?";
}

const char* family_label(Family f) {
  switch (f) {
    case Family::Lambda: return "Aloha stability region inner bound";
    case Family::Srs: return "square root sum inner bound";
    case Family::PiStar: return "polyhedral inner bound";
    case Family::Po: return "polyhedral outer bound";
    case Family::SiStar: return "spherical inner bound";
    case Family::SoStar: return "spherical outer bound";
    case Family::Ei: return "ellipsoid inner bound";
    case Family::Eo: return "ellipsoid outer bound";
    case Family::PoAndSo: return "polyhedral and spherical outer bound";
  }
  return "?";
}

bool family_has_exact_volume(Family f) {
  return f == Family::Lambda || f == Family::Srs || f == Family::PiStar;
}

std::function<bool(const RateVector&)> family_predicate(Family f, int n, double c_ellipsoid) {
  switch (f) {
    case Family::Lambda:
      return [](const RateVector& x) { return classify(x).cls != MembershipClass::Exterior; };
    case Family::Srs:
      return [](const RateVector& x) { return in_srs(x); };
    case Family::PiStar:
      return [](const RateVector& x) { return in_pi_star(x); };
    case Family::Po: {
      const PolytopeP P = make_polytope(n);
      return [P](const RateVector& x) { return in_po(x, P); };
    }
    case Family::SiStar: {
      const SphereParams sp = sphere_params(n, c_in_star(n), BoundKind::Inner);
      return [sp](const RateVector& x) { return in_sphere_bound(x, sp); };
    }
    case Family::SoStar: {
      const SphereParams sp = sphere_params(n, 1.0, BoundKind::Outer);
      return [sp](const RateVector& x) { return in_sphere_bound(x, sp); };
    }
    case Family::Ei: {
      const EllipsoidParams e = ellipsoid_params(n, c_ellipsoid, BoundKind::Inner);
      return [e](const RateVector& x) { return in_simplex(x) && quad_form(x, e) >= 1.0 - kBoundarySlack; };
    }
    case Family::Eo: {
      const EllipsoidParams e = ellipsoid_params(n, c_ellipsoid, BoundKind::Outer);
      return [e](const RateVector& x) { return in_simplex(x) && quad_form(x, e) >= 1.0 - kBoundarySlack; };
    }
    case Family::PoAndSo: {
      const PolytopeP P = make_polytope(n);
      const SphereParams sp = sphere_params(n, 1.0, BoundKind::Outer);
      return [P, sp](const RateVector& x) { return in_po(x, P) && in_sphere_bound(x, sp); };
    }
  }
  throw std::invalid_argument("family_predicate: unknown family");
}

ExactVolume family_exact_volume(Family f, int n, bool use_oracle_for_lambda) {
  switch (f) {
    case Family::Lambda:
      return use_oracle_for_lambda ? vol_lambda_oracle(n) : vol_lambda_exact(n);
    case Family::Srs: return vol_srs_exact(n);
    case Family::PiStar: return vol_pi_star_exact(n);
    default:
      throw std::invalid_argument("family_exact_volume: family has no exact volume");
  }
}

}  // namespace aloha
