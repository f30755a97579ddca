#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "aloha/membership.hpp"
#include "aloha/rng.hpp"

using namespace aloha;

namespace {

const double kSqrt41 = std::sqrt(41.0);

}  // namespace

TEST_CASE("eval_f anchors") {
  CHECK(eval_f(0.0, RateVector{{0.7, 0.1, 0.4}}) == doctest::Approx(1.0));
  CHECK(eval_f(16.0 / 3.0, RateVector{{1.0 / 16, 9.0 / 16}}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval_f((11.0 - kSqrt41) / 2.0, RateVector{{0.25, 0.2}}) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("find_positive_roots on the three reference cases") {
  const auto interior = find_positive_roots(RateVector{{0.25, 0.2}});
  REQUIRE(interior.size() == 2);
  CHECK(std::fabs(interior[0] - (11.0 - kSqrt41) / 2.0) < 1e-9);
  CHECK(std::fabs(interior[1] - (11.0 + kSqrt41) / 2.0) < 1e-9);

  const auto boundary = find_positive_roots(RateVector{{1.0 / 16, 9.0 / 16}});
  REQUIRE(boundary.size() == 1);
  CHECK(std::fabs(boundary[0] - 16.0 / 3.0) < 1e-9);

  CHECK(find_positive_roots(RateVector{{0.25, 1.0 / 3}}).empty());
}

TEST_CASE("classify interior point carries both critical controls") {
  const MembershipReport rep = classify(RateVector{{0.25, 0.2}});
  CHECK(rep.cls == MembershipClass::Interior);
  REQUIRE(rep.controls.size() == 2);
  CHECK(std::fabs(rep.controls[0][0] - (21.0 - kSqrt41) / 40.0) < 1e-9);
  CHECK(std::fabs(rep.controls[0][1] - (19.0 - kSqrt41) / 40.0) < 1e-9);
  CHECK(std::fabs(rep.controls[1][0] - (21.0 + kSqrt41) / 40.0) < 1e-9);
  CHECK(std::fabs(rep.controls[1][1] - (19.0 + kSqrt41) / 40.0) < 1e-9);
  CHECK(sum(rep.controls[0].v) < 1.0);
  CHECK(sum(rep.controls[1].v) > 1.0);
}

TEST_CASE("classify boundary, unit-vector, and exterior points") {
  const MembershipReport b = classify(RateVector{{1.0 / 16, 9.0 / 16}});
  CHECK(b.cls == MembershipClass::Boundary);
  REQUIRE(b.controls.size() == 1);
  const ContentionVector expect = p_of_delta(16.0 / 3.0, RateVector{{1.0 / 16, 9.0 / 16}});
  CHECK(b.controls[0][0] == doctest::Approx(expect[0]).epsilon(1e-9));
  CHECK(b.controls[0][1] == doctest::Approx(expect[1]).epsilon(1e-9));
  CHECK(sum(b.controls[0].v) == doctest::Approx(1.0).epsilon(1e-9));

  const MembershipReport e1 = classify(unit_rate(2, 0));
  CHECK(e1.cls == MembershipClass::Boundary);
  REQUIRE(e1.special_unit_vector.has_value());
  CHECK(*e1.special_unit_vector == 0);
  CHECK(e1.controls[0][0] == 1.0);

  CHECK(classify(RateVector{{0.25, 1.0 / 3}}).cls == MembershipClass::Exterior);

  // Mixed vectors with a component pinned at one are infeasible.
  CHECK(classify(RateVector{{1.0, 0.5}}).cls == MembershipClass::Exterior);
}

TEST_CASE("classify reduces zero components and re-embeds controls") {
  const MembershipReport rep = classify(RateVector{{0.3, 0.0}});
  CHECK(rep.cls == MembershipClass::Interior);
  REQUIRE(rep.reduced_dims.size() == 1);
  CHECK(rep.reduced_dims[0] == 1);
  REQUIRE(rep.controls.size() == 1);
  CHECK(rep.controls[0][0] == doctest::Approx(0.3));
  CHECK(rep.controls[0][1] == 0.0);
  REQUIRE(rep.roots.size() == 1);
  CHECK(rep.roots[0] == doctest::Approx(1.0 / 0.7));

  const MembershipReport zero = classify(RateVector{{0.0, 0.0, 0.0}});
  CHECK(zero.cls == MembershipClass::Interior);
  CHECK(zero.roots[0] == doctest::Approx(1.0));
  CHECK(sum(zero.controls[0].v) == 0.0);

  const MembershipReport mid = classify(RateVector{{0.2, 0.0, 0.1}});
  CHECK(mid.cls == MembershipClass::Interior);
  REQUIRE(mid.controls.size() == 2);
  CHECK(mid.controls[0][1] == 0.0);
  CHECK(mid.controls[1][1] == 0.0);
  const RateVector round = x_of_p(mid.controls[0]);
  CHECK(round[0] == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(round[2] == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("eval_g anchors") {
  const ContentionVector p{{0.3, 0.5, 0.1}};
  CHECK(eval_g(0.0, p) == doctest::Approx(0.0));
  CHECK(eval_g(-1.0, p) == doctest::Approx(pi_of_p(p)).epsilon(1e-14));

  const ContentionVector ps = p_of_delta((11.0 - kSqrt41) / 2.0, RateVector{{0.25, 0.2}});
  CHECK(eval_g((41.0 + 11.0 * kSqrt41) / 40.0, ps) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transfer_root maps between the paired controls") {
  const RateVector x{{0.25, 0.2}};
  const ContentionVector ps = p_of_delta((11.0 - kSqrt41) / 2.0, x);
  const ContentionVector pl = p_of_delta((11.0 + kSqrt41) / 2.0, x);

  const auto up = transfer_root(ps);
  REQUIRE(up.has_value());
  CHECK(std::fabs(*up - (11.0 + kSqrt41) / 2.0) < 1e-9);

  const auto down = transfer_root(pl);
  REQUIRE(down.has_value());
  CHECK(std::fabs(*down - (11.0 - kSqrt41) / 2.0) < 1e-9);

  CHECK_FALSE(transfer_root(ContentionVector{{0.5, 0.5}}).has_value());
  CHECK_THROWS_AS(transfer_root(ContentionVector{{1.0, 0.2}}), std::invalid_argument);
}

TEST_CASE("boundary_point maps the facet onto the region boundary") {
  const int n = 4;
  const RateVector m = boundary_point(ContentionVector{std::vector<double>(n, 1.0 / n)});
  for (int i = 0; i < n; ++i) CHECK(m[i] == doctest::Approx(all_rates_equal_m(n)).epsilon(1e-14));

  const RateVector corner = boundary_point(ContentionVector{{1.0, 0.0}});
  CHECK(corner[0] == 1.0);
  CHECK(corner[1] == 0.0);

  const RateVector x = boundary_point(ContentionVector{{0.25, 0.75}});
  CHECK(x[0] == doctest::Approx(1.0 / 16).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(9.0 / 16).epsilon(1e-14));
  CHECK(classify(x).cls == MembershipClass::Boundary);

  CHECK_THROWS_AS(boundary_point(ContentionVector{{0.3, 0.3}}), NotOnFacet);
}

TEST_CASE("root count is 0, 1, or 2 on random rate vectors") {
  for (int n = 2; n <= 6; ++n) {
    SplitMix64 rng(100 + n);
    for (int t = 0; t < 10000; ++t) {
      const RateVector x = sample_cube(n, rng);
      const auto roots = find_positive_roots(x);
      REQUIRE(roots.size() <= 2);
      if (roots.size() == 2) CHECK(roots[0] < roots[1]);
      for (double d : roots) CHECK(std::fabs(eval_f(d, x)) <= 1e-10 * std::max(1.0, d));
    }
  }
}

TEST_CASE("critical controls reproduce x and satisfy delta * pi(p) = 1") {
  for (int n = 2; n <= 6; ++n) {
    SplitMix64 rng(300 + n);
    int interior_seen = 0;
    while (interior_seen < 200) {
      const RateVector x = sample_cube(n, rng);
      const MembershipReport rep = classify(x);
      if (rep.cls != MembershipClass::Interior) continue;
      ++interior_seen;
      REQUIRE(rep.controls.size() == 2);
      CHECK(sum(rep.controls[0].v) < 1.0);
      CHECK(sum(rep.controls[1].v) > 1.0);
      for (int k = 0; k < 2; ++k) {
        const RateVector back = x_of_p(rep.controls[k]);
        for (int i = 0; i < n; ++i) CHECK(std::fabs(back[i] - x[i]) < 1e-9);
        CHECK(std::fabs(rep.roots[k] * pi_of_p(rep.controls[k]) - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("facet-interior bijection round trip recovers p_s") {
  for (int n = 2; n <= 6; ++n) {
    SplitMix64 rng(500 + n);
    for (int t = 0; t < 300; ++t) {
      const ContentionVector p = sample_simplex_interior(n, rng);
      const MembershipReport rep = classify(x_of_p(p));
      REQUIRE(rep.cls == MembershipClass::Interior);
      for (int i = 0; i < n; ++i) CHECK(std::fabs(rep.controls[0][i] - p[i]) < 1e-9);
    }
  }
}

TEST_CASE("transfer involution returns to the starting root") {
  SplitMix64 rng(41);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 4);
    const ContentionVector p = sample_simplex_interior(n, rng);
    const RateVector x = x_of_p(p);
    const double delta_s = 1.0 / pi_of_p(p);

    const auto forward = transfer_root(p);
    REQUIRE(forward.has_value());
    const ContentionVector pl = p_of_delta(*forward, x);
    const auto back = transfer_root(pl);
    REQUIRE(back.has_value());
    CHECK(std::fabs(*back - delta_s) < 1e-9 * std::max(1.0, delta_s));
  }
}

TEST_CASE("coordinate convexity on random dominated pairs") {
  SplitMix64 rng(77);
  for (int t = 0; t < 3000; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 4);
    const RateVector x = sample_cube(n, rng);
    if (classify(x).cls == MembershipClass::Exterior) continue;
    RateVector y = x;
    for (int i = 0; i < n; ++i) y[i] *= rng.next_double();
    CHECK(classify(y).cls != MembershipClass::Exterior);
  }
}

namespace {

// Brute-force oracle on an x-grid: mark the cells dominated by some x(p)
// over a p-grid, then sweep the suffix-OR so that every dominated cell is
// covered. Coordinate convexity makes the marking sound.
std::vector<char> dominance_grid(int n, int xgrid, int pgrid) {
  std::size_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= static_cast<std::size_t>(xgrid + 1);
  std::vector<char> mark(cells, 0);

  std::vector<int> idx(n, 0);
  ContentionVector p{std::vector<double>(n, 0.0)};
  while (true) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = static_cast<double>(idx[i]) / pgrid;
      s += p[i];
    }
    if (s <= 1.0) {
      const RateVector y = x_of_p(p);
      std::size_t cell = 0;
      for (int i = 0; i < n; ++i) {
        int c = static_cast<int>(std::floor(y[i] * xgrid));
        c = std::min(c, xgrid);
        cell = cell * (xgrid + 1) + static_cast<std::size_t>(c);
      }
      mark[cell] = 1;
    }
    int pos = n - 1;
    while (pos >= 0 && idx[pos] == pgrid) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }

  // Suffix OR along each axis: cell dominated if any cell >= it is marked.
  std::size_t stride = 1;
  for (int axis = n - 1; axis >= 0; --axis) {
    for (std::size_t base = 0; base < cells; ++base) {
      const std::size_t coord = (base / stride) % (xgrid + 1);
      if (coord == 0) {
        for (int c = xgrid - 1; c >= 0; --c) {
          const std::size_t lo = base + static_cast<std::size_t>(c) * stride;
          mark[lo] = static_cast<char>(mark[lo] | mark[lo + stride]);
        }
      }
    }
    stride *= static_cast<std::size_t>(xgrid + 1);
  }
  return mark;
}

}  // namespace

TEST_CASE("grid oracle agrees with classify away from the boundary band") {
  const int xgrid = 50, pgrid = 200;
  for (int n = 2; n <= 3; ++n) {
    const std::vector<char> oracle = dominance_grid(n, xgrid, pgrid);
    std::vector<int> idx(n, 0);
    RateVector x{std::vector<double>(n, 0.0)};
    while (true) {
      std::size_t cell = 0;
      for (int i = 0; i < n; ++i) {
        x[i] = static_cast<double>(idx[i]) / xgrid;
        cell = cell * (xgrid + 1) + static_cast<std::size_t>(idx[i]);
      }
      const bool oracle_in = oracle[cell] != 0;
      // A dominating grid p certifies membership outright.
      if (oracle_in) CHECK(classify(x).cls != MembershipClass::Exterior);

      // Points at diagonal distance > 0.01 inside the region must be found
      // by the oracle; the band around the boundary is left undecided.
      RateVector deep = x;
      for (int i = 0; i < n; ++i) deep[i] += 0.01;
      if (classify(deep).cls != MembershipClass::Exterior) CHECK(oracle_in);

      int pos = n - 1;
      while (pos >= 0 && idx[pos] == xgrid) idx[pos--] = 0;
      if (pos < 0) break;
      ++idx[pos];
    }
  }
}

TEST_CASE("transfer_root rejects degenerate controls") {
  CHECK_THROWS_AS(transfer_root(ContentionVector{{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(transfer_root(ContentionVector{{0.3, 0.0, 0.0}}), std::invalid_argument);
}
