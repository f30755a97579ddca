#include <doctest.h>

#include <cmath>
#include <vector>

#include "aloha/core.hpp"
#include "aloha/membership.hpp"
#include "aloha/rng.hpp"
#include "aloha/stability.hpp"

using namespace aloha;

namespace {

ContentionVector random_open_cube(int n, SplitMix64& rng) {
  ContentionVector p{std::vector<double>(n, 0.0)};
  for (int i = 0; i < n; ++i) p[i] = 1e-3 + rng.next_double() * (1.0 - 2e-3);
  return p;
}

}  // namespace

TEST_CASE("excess rate vanishes at critical controls") {
  SplitMix64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 4);
    const ContentionVector p = sample_simplex_interior(n, rng);
    const ExcessRateContext ctx = ExcessRateContext::make(x_of_p(p));
    for (int i = 0; i < n; ++i)
      CHECK(excess_rate(ctx, p, i) == doctest::Approx(0.0).epsilon(1e-12));
  }

  const ExcessRateContext zero = ExcessRateContext::make(RateVector{{0.0, 0.0}});
  CHECK(excess_rate(zero, ContentionVector{{0.4, 0.3}}, 0) <= 0.0);

  const ExcessRateContext fig = ExcessRateContext::make(RateVector{{0.25, 0.2}});
  const MembershipReport rep = classify(fig.x);
  for (int i = 0; i < 2; ++i)
    CHECK(std::fabs(excess_rate(fig, rep.controls[0], i)) < 1e-9);
}

TEST_CASE("gradient closed form at n = 2") {
  const ExcessRateContext ctx = ExcessRateContext::make(RateVector{{0.3, 0.1}});
  const ContentionVector p{{0.37, 0.22}};
  const auto g = excess_grad(ctx, p, 0);
  CHECK(g[0] == doctest::Approx(-(1.0 - 0.22)));
  CHECK(g[1] == doctest::Approx(0.37));
  CHECK(g[0] < 0.0);
}

TEST_CASE("gradient and Hessian match finite differences") {
  const double h = 1e-6;
  const double h2 = 1e-4;  // second differences need a wider step for the
                           // roundoff floor eps/h^2 to stay below tolerance
  for (int n = 2; n <= 6; ++n) {
    SplitMix64 rng(900 + n);
    const ExcessRateContext ctx =
        ExcessRateContext::make(RateVector{std::vector<double>(n, 0.1)});
    for (int t = 0; t < 100; ++t) {
      const ContentionVector p = random_open_cube(n, rng);
      const int i = static_cast<int>(rng.next() % n);

      const auto grad = excess_grad(ctx, p, i);
      for (int k = 0; k < n; ++k) {
        ContentionVector hi = p, lo = p;
        hi[k] += h;
        lo[k] -= h;
        const double fd = (excess_rate(ctx, hi, i) - excess_rate(ctx, lo, i)) / (2 * h);
        CHECK(std::fabs(fd - grad[k]) <= 1e-6 * std::max(1.0, std::fabs(grad[k])));
      }

      const auto hess = excess_hessian(ctx, p, i);
      for (int k = 0; k < n; ++k) {
        CHECK(hess[k][k] == 0.0);
        for (int l = 0; l < n; ++l) {
          ContentionVector pp = p, pm = p, mp = p, mm = p;
          pp[k] += h2; pp[l] += h2;
          pm[k] += h2; pm[l] -= h2;
          mp[k] -= h2; mp[l] += h2;
          mm[k] -= h2; mm[l] -= h2;
          const double fd = (excess_rate(ctx, pp, i) - excess_rate(ctx, pm, i) -
                             excess_rate(ctx, mp, i) + excess_rate(ctx, mm, i)) /
                            (4 * h2 * h2);
          CHECK(std::fabs(fd - hess[k][l]) <= 1e-5 * std::max(1.0, std::fabs(hess[k][l])));
        }
      }
    }
  }
}

TEST_CASE("two-user Hessian is the exchange matrix") {
  const ExcessRateContext ctx = ExcessRateContext::make(RateVector{{0.1, 0.1}});
  const auto h = excess_hessian(ctx, ContentionVector{{0.3, 0.6}}, 0);
  CHECK(h[0][0] == 0.0);
  CHECK(h[1][1] == 0.0);
  CHECK(h[0][1] == 1.0);
  CHECK(h[1][0] == 1.0);
}

TEST_CASE("stabilizing set membership") {
  const ExcessRateContext fig = ExcessRateContext::make(RateVector{{0.25, 0.2}});
  const MembershipReport rep = classify(fig.x);
  CHECK(in_stabilizing_set(fig, rep.controls[0]));
  CHECK(in_stabilizing_set(fig, rep.controls[1]));

  const ExcessRateContext zero = ExcessRateContext::make(RateVector{{0.0, 0.0, 0.0}});
  SplitMix64 rng(3);
  for (int t = 0; t < 50; ++t) CHECK(in_stabilizing_set(zero, random_open_cube(3, rng)));

  // Exterior point: no control on a grid scan stabilizes it.
  const ExcessRateContext ext = ExcessRateContext::make(RateVector{{0.25, 1.0 / 3}});
  CHECK(classify(ext.x).cls == MembershipClass::Exterior);
  for (int a = 0; a <= 100; ++a) {
    for (int b = 0; b <= 100; ++b) {
      CHECK_FALSE(in_stabilizing_set(ext, ContentionVector{{a / 100.0, b / 100.0}}));
    }
  }
}

TEST_CASE("stabilizing sets are empty exactly outside the region (grid)") {
  const int grid = 40, pgrid = 120;
  for (int a = 0; a <= grid; ++a) {
    for (int b = 0; b <= grid; ++b) {
      const RateVector x{{static_cast<double>(a) / grid, static_cast<double>(b) / grid}};
      const MembershipReport rep = classify(x);
      if (rep.cls == MembershipClass::Interior) {
        const ExcessRateContext ctx = ExcessRateContext::make(x);
        CHECK(in_stabilizing_set(ctx, rep.controls[0]));
      } else if (rep.cls == MembershipClass::Exterior) {
        const ExcessRateContext ctx = ExcessRateContext::make(x);
        bool any = false;
        for (int i = 0; i <= pgrid && !any; ++i)
          for (int j = 0; j <= pgrid && !any; ++j)
            any = in_stabilizing_set(
                ctx, ContentionVector{{static_cast<double>(i) / pgrid,
                                       static_cast<double>(j) / pgrid}});
        CHECK_FALSE(any);
      }
    }
  }
}

TEST_CASE("convexity probe sees no violations") {
  const ExcessRateContext ctx = ExcessRateContext::make(RateVector{{0.25, 0.2}});
  const ConvexityReport rep = convexity_probe(ctx, 300, 99);
  CHECK(rep.pairs == 300);
  CHECK(rep.violations == 0);

  // The segment between the two critical controls stays in the set.
  const MembershipReport mrep = classify(ctx.x);
  for (int k = 1; k < 20; ++k) {
    const double theta = k / 20.0;
    ContentionVector mix{{0.0, 0.0}};
    for (int i = 0; i < 2; ++i)
      mix[i] = theta * mrep.controls[0][i] + (1 - theta) * mrep.controls[1][i];
    for (int i = 0; i < 2; ++i) CHECK(excess_rate(ctx, mix, i) <= 1e-12);
  }

  // Near-boundary rate vector.
  const RateVector nb = x_of_p(ContentionVector{{0.33, 0.33, 0.33}});
  RateVector scaled = nb;
  for (int i = 0; i < 3; ++i) scaled[i] *= 0.99;
  const ConvexityReport rep2 =
      convexity_probe(ExcessRateContext::make(scaled), 200, 7);
  CHECK(rep2.violations == 0);

  CHECK_THROWS_AS(convexity_probe(ExcessRateContext::make(RateVector{{0.4, 0.4}}), 10, 1),
                  std::invalid_argument);
}

TEST_CASE("pseudoconvexity probe: tangent curvature stays positive") {
  // Closed form at n = 2: q ~ (a, 1-b) gives q'Hq = 2a(1-b) > 0.
  const ExcessRateContext ctx2 = ExcessRateContext::make(RateVector{{0.0, 0.0}});
  const double a = 0.3, b = 0.45;
  const auto grad = excess_grad(ctx2, ContentionVector{{a, b}}, 0);
  const std::vector<double> q = {a, 1.0 - b};
  CHECK(grad[0] * q[0] + grad[1] * q[1] == doctest::Approx(0.0).epsilon(1e-12));
  const auto hess = excess_hessian(ctx2, ContentionVector{{a, b}}, 0);
  double quad = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) quad += q[k] * hess[k][l] * q[l];
  CHECK(quad == doctest::Approx(2 * a * (1 - b)).epsilon(1e-12));

  for (int n = 2; n <= 5; ++n) {
    const ExcessRateContext ctx =
        ExcessRateContext::make(RateVector{std::vector<double>(n, 0.0)});
    const PseudoconvexityReport rep = pseudoconvexity_probe(ctx, 0, 1000, 2000 + n);
    CHECK(rep.samples == 1000);
    CHECK(rep.nonpositive == 0);
    CHECK(rep.min_quadratic > 1e-10);
  }
}

TEST_CASE("sublevel probe on convex sublevel sets") {
  const ExcessRateContext ctx = ExcessRateContext::make(RateVector{{0.2, 0.15, 0.1}});

  // alpha >= x_i: the sublevel set is the whole cube.
  const SublevelReport whole = sublevel_probe(ctx, 0, 0.5, 100, 5);
  CHECK(whole.violations == 0);

  // alpha = 0 mirrors the one-constraint convexity check.
  const SublevelReport zero = sublevel_probe(ctx, 0, 0.0, 200, 6);
  CHECK(zero.violations == 0);

  const SublevelReport mid = sublevel_probe(ctx, 0, 0.1, 200, 7);
  CHECK(mid.violations == 0);
}

TEST_CASE("midpoint witness shows the excess rate is not convex") {
  // p1 = (1-eps, eps/(n-1), ...), p2 = uniform, theta = 1/2.
  const int n = 2;
  const ExcessRateContext ctx =
      ExcessRateContext::make(RateVector{std::vector<double>(n, 0.1)});
  bool found = false;
  for (int k = 1; k < 100 && !found; ++k) {
    const double eps = k / 100.0;
    ContentionVector p1{std::vector<double>(n, eps / (n - 1))};
    p1[0] = 1.0 - eps;
    const ContentionVector p2{std::vector<double>(n, 1.0 / n)};
    ContentionVector mid{std::vector<double>(n, 0.0)};
    for (int i = 0; i < n; ++i) mid[i] = 0.5 * (p1[i] + p2[i]);
    const double lhs = excess_rate(ctx, mid, 0);
    const double rhs = 0.5 * (excess_rate(ctx, p1, 0) + excess_rate(ctx, p2, 0));
    if (lhs > rhs + 1e-12) found = true;
  }
  CHECK(found);
}
