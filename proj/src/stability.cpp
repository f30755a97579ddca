#include "aloha/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aloha/core.hpp"
#include "aloha/membership.hpp"
#include "aloha/rng.hpp"

namespace aloha {

namespace {

constexpr double kCubeMargin = 1e-3;   // open-cube clamp for derivative probes
constexpr double kSlackTol = 1e-12;    // violation threshold on constraint slack
constexpr long kMemberBudget = 100000; // rejection attempts per requested member

double prod_except(const ContentionVector& p, int skip) {
  double prod = 1.0;
  for (int j = 0; j < static_cast<int>(p.dim()); ++j)
    if (j != skip) prod *= (1.0 - p[j]);
  return prod;
}

double prod_except2(const ContentionVector& p, int skip_a, int skip_b) {
  double prod = 1.0;
  for (int j = 0; j < static_cast<int>(p.dim()); ++j)
    if (j != skip_a && j != skip_b) prod *= (1.0 - p[j]);
  return prod;
}

double prod_except3(const ContentionVector& p, int a, int b, int c) {
  double prod = 1.0;
  for (int j = 0; j < static_cast<int>(p.dim()); ++j)
    if (j != a && j != b && j != c) prod *= (1.0 - p[j]);
  return prod;
}

}  // namespace

double excess_rate(const ExcessRateContext& ctx, const ContentionVector& p, int i) {
  return ctx.x[i] - p[i] * prod_except(p, i);
}

std::vector<double> excess_grad(const ExcessRateContext& ctx, const ContentionVector& p,
                                int i) {
  (void)ctx;
  const int n = static_cast<int>(p.dim());
  std::vector<double> g(n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (k == i)
      g[k] = -prod_except(p, i);
    else
      g[k] = p[i] * prod_except2(p, i, k);
  }
  return g;
}

std::vector<std::vector<double>> excess_hessian(const ExcessRateContext& ctx,
                                                const ContentionVector& p, int i) {
  (void)ctx;
  const int n = static_cast<int>(p.dim());
  std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      if (k == i)
        h[k][l] = prod_except2(p, l, i);
      else if (l == i)
        h[k][l] = prod_except2(p, k, i);
      else
        h[k][l] = -p[i] * prod_except3(p, k, l, i);
    }
  }
  return h;
}

bool in_stabilizing_set(const ExcessRateContext& ctx, const ContentionVector& p) {
  // Slack keeps the critical controls (exact equality) on the member side.
  for (int i = 0; i < ctx.n; ++i)
    if (excess_rate(ctx, p, i) > kSlackTol) return false;
  return true;
}

namespace {

// One member of the stabilizing set: jitter around a critical control,
// falling back to uniform draws once half the budget is spent.
ContentionVector sample_member(const ExcessRateContext& ctx,
                               const std::vector<ContentionVector>& anchors,
                               SplitMix64& rng) {
  const int n = ctx.n;
  ContentionVector cand{std::vector<double>(n, 0.0)};
  for (long attempt = 0; attempt < kMemberBudget; ++attempt) {
    if (attempt < kMemberBudget / 2 && !anchors.empty()) {
      const ContentionVector& base = anchors[rng.next() % anchors.size()];
      for (int i = 0; i < n; ++i) {
        const double jittered = base[i] + 0.05 * rng.next_gaussian();
        cand[i] = std::clamp(jittered, kCubeMargin, 1.0 - kCubeMargin);
      }
    } else {
      for (int i = 0; i < n; ++i) cand[i] = rng.next_double();
    }
    if (in_stabilizing_set(ctx, cand)) return cand;
  }
  throw SamplingExhausted("sample_member: no stabilizing control found within budget");
}

const double kThetaGrid[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

}  // namespace

ConvexityReport convexity_probe(const ExcessRateContext& ctx, long trials,
                                std::uint64_t seed) {
  const MembershipReport rep = classify(ctx.x);
  if (rep.cls != MembershipClass::Interior)
    throw std::invalid_argument("convexity_probe: rate vector must be Interior");

  ConvexityReport report;
  report.worst_slack = -std::numeric_limits<double>::infinity();
  ContentionVector mix{std::vector<double>(ctx.n, 0.0)};
  for (long t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(t));
    const ContentionVector a = sample_member(ctx, rep.controls, rng);
    const ContentionVector b = sample_member(ctx, rep.controls, rng);
    for (double theta : kThetaGrid) {
      for (int i = 0; i < ctx.n; ++i) mix[i] = theta * a[i] + (1.0 - theta) * b[i];
      double slack = -1.0;
      for (int i = 0; i < ctx.n; ++i) slack = std::max(slack, excess_rate(ctx, mix, i));
      report.worst_slack = std::max(report.worst_slack, slack);
      if (slack > kSlackTol) ++report.violations;
    }
    ++report.pairs;
  }
  return report;
}

PseudoconvexityReport pseudoconvexity_probe(const ExcessRateContext& ctx, int i,
                                            long trials, std::uint64_t seed) {
  if (i < 0 || i >= ctx.n) throw std::invalid_argument("pseudoconvexity_probe: bad index");

  PseudoconvexityReport report;
  report.min_quadratic = std::numeric_limits<double>::infinity();
  const int n = ctx.n;
  ContentionVector p{std::vector<double>(n, 0.0)};
  std::vector<double> q(n, 0.0);

  for (long t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(t));
    for (int j = 0; j < n; ++j)
      p[j] = kCubeMargin + rng.next_double() * (1.0 - 2.0 * kCubeMargin);

    const std::vector<double> grad = excess_grad(ctx, p, i);
    double gnorm2 = 0.0;
    for (double g : grad) gnorm2 += g * g;

    // Project a random direction onto the tangent space of f_i at p.
    double qnorm = 0.0;
    do {
      double dot = 0.0;
      for (int j = 0; j < n; ++j) {
        q[j] = rng.next_gaussian();
        dot += q[j] * grad[j];
      }
      qnorm = 0.0;
      for (int j = 0; j < n; ++j) {
        q[j] -= dot / gnorm2 * grad[j];
        qnorm += q[j] * q[j];
      }
      qnorm = std::sqrt(qnorm);
    } while (qnorm < 1e-8);
    for (int j = 0; j < n; ++j) q[j] /= qnorm;

    const auto hess = excess_hessian(ctx, p, i);
    double quad = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) quad += q[k] * hess[k][l] * q[l];

    report.min_quadratic = std::min(report.min_quadratic, quad);
    if (!(quad > 1e-10)) ++report.nonpositive;
    ++report.samples;
  }
  return report;
}

SublevelReport sublevel_probe(const ExcessRateContext& ctx, int i, double alpha_level,
                              long trials, std::uint64_t seed) {
  if (i < 0 || i >= ctx.n) throw std::invalid_argument("sublevel_probe: bad index");

  const int n = ctx.n;
  SublevelReport report;
  report.worst_slack = -std::numeric_limits<double>::infinity();
  ContentionVector a{std::vector<double>(n, 0.0)}, b{std::vector<double>(n, 0.0)},
      mix{std::vector<double>(n, 0.0)};

  auto sample_sublevel = [&](ContentionVector& out, SplitMix64& rng) {
    for (long attempt = 0; attempt < kMemberBudget; ++attempt) {
      for (int j = 0; j < n; ++j)
        out[j] = kCubeMargin + rng.next_double() * (1.0 - 2.0 * kCubeMargin);
      if (excess_rate(ctx, out, i) <= alpha_level) return;
    }
    throw SamplingExhausted("sublevel_probe: empty-looking sublevel set");
  };

  for (long t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(t));
    sample_sublevel(a, rng);
    sample_sublevel(b, rng);
    for (double theta : kThetaGrid) {
      for (int j = 0; j < n; ++j) mix[j] = theta * a[j] + (1.0 - theta) * b[j];
      const double slack = excess_rate(ctx, mix, i) - alpha_level;
      report.worst_slack = std::max(report.worst_slack, slack);
      if (slack > kSlackTol) ++report.violations;
    }
    ++report.pairs;
  }
  return report;
}

}  // namespace aloha
