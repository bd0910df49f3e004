#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "cgps/grid.hpp"
#include "cgps/rng.hpp"

using Catch::Approx;
using cgps::DomainF;
using cgps::KnotGrid;

namespace {
DomainF holey() { return DomainF({{0.0, 0.3}, {0.6, 1.0}}); }
}  // namespace

TEST_CASE("hat functions") {
  const KnotGrid g({0.0, 0.5, 1.0}, DomainF::unit());
  SECTION("interpolation property") {
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        REQUIRE(g.hat(i, g.knot(j)) == (i == j ? 1.0 : 0.0));
  }
  SECTION("linear ramp") { REQUIRE(g.hat(1, 0.25) == Approx(0.5)); }
  SECTION("partition of unity at an interior point") {
    const KnotGrid g4({0.0, 0.3, 0.6, 1.0}, DomainF::unit());
    REQUIRE(g4.hat(1, 0.37) + g4.hat(2, 0.37) == Approx(1.0).margin(1e-15));
  }
  SECTION("partition of unity everywhere") {
    cgps::Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
      const double t = rng.uniform();
      double s = 0.0;
      for (std::size_t i = 0; i < 3; ++i) s += g.hat(i, t);
      REQUIRE(std::abs(s - 1.0) <= 1e-15);
    }
  }
}

TEST_CASE("neighbors") {
  const KnotGrid g({0.0, 0.5, 1.0}, DomainF::unit());
  SECTION("knot case") {
    const auto nb = g.neighbors(0.5);
    REQUIRE(nb.t_minus == 0.5);
    REQUIRE(nb.t_plus == 0.5);
    REQUIRE(nb.w_minus == 0.5);
    REQUIRE(nb.w_plus == 0.5);
  }
  SECTION("interior weights") {
    const auto nb = g.neighbors(0.125);
    REQUIRE(nb.t_minus == 0.0);
    REQUIRE(nb.t_plus == 0.5);
    REQUIRE(nb.w_minus == Approx(0.75));
    REQUIRE(nb.w_plus == Approx(0.25));
    REQUIRE(nb.w_minus + nb.w_plus == Approx(1.0).margin(1e-15));
  }
  SECTION("two-knot grid") {
    const KnotGrid g2({0.0, 1.0}, DomainF::unit());
    const auto nb = g2.neighbors(1.0 / 3.0);
    REQUIRE(nb.w_minus == Approx(2.0 / 3.0));
    REQUIRE(nb.w_plus == Approx(1.0 / 3.0));
  }
}

TEST_CASE("projection pi_N") {
  const KnotGrid g({0.0, 0.5, 1.0}, DomainF::unit());
  SECTION("parabola at the midpoint of the first gap") {
    const auto p = cgps::project_pi(g, [](double t) { return t * t; });
    REQUIRE(p(0.25) == Approx(0.125));
  }
  SECTION("piecewise linear functions are fixed points") {
    const cgps::PiecewiseLinear u(g, {0.2, -0.4, 1.0});
    const auto p = cgps::project_pi(g, u);
    cgps::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const double t = rng.uniform();
      REQUIRE(p(t) == Approx(u(t)).margin(1e-15));
    }
  }
  SECTION("constants are preserved") {
    const auto p = cgps::project_pi(g, [](double) { return 3.25; });
    REQUIRE(p(0.77) == Approx(3.25));
  }
  SECTION("idempotence on a finer audit") {
    const auto p = cgps::project_pi(g, [](double t) { return std::sqrt(t); });
    const auto pp = cgps::project_pi(g, p);
    cgps::Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
      const double t = rng.uniform();
      REQUIRE(std::abs(pp(t) - p(t)) <= 1e-14);
    }
  }
}

TEST_CASE("multi-affine extension") {
  SECTION("identity on the unit domain") {
    const auto f = [](double t) { return std::sin(t); };
    REQUIRE(cgps::extend_multi_affine(DomainF::unit(), f, 0.42) == Approx(std::sin(0.42)));
  }
  SECTION("affine bridge across a hole") {
    const auto u = [](double t) { return t <= 0.3 ? 1.0 + 0.0 * t : 3.0; };
    REQUIRE(cgps::extend_multi_affine(holey(), u, 0.45) == Approx(2.0));
  }
  SECTION("linearity") {
    cgps::Rng rng(17);
    const auto u = [](double t) { return std::cos(3.0 * t); };
    const auto v = [](double t) { return t * t - 0.3; };
    for (int i = 0; i < 200; ++i) {
      const double t = rng.uniform();
      const double a = rng.uniform(-2.0, 2.0), c = rng.uniform(-2.0, 2.0);
      const auto combo = [&](double s) { return a * u(s) + c * v(s); };
      const double lhs = cgps::extend_multi_affine(holey(), combo, t);
      const double rhs = a * cgps::extend_multi_affine(holey(), u, t) +
                         c * cgps::extend_multi_affine(holey(), v, t);
      REQUIRE(lhs == Approx(rhs).margin(1e-12));
    }
  }
  SECTION("1-Lipschitz in sup norm") {
    cgps::Rng rng(23);
    const DomainF f = holey();
    const auto audit = f.audit_points(501);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> du(audit.size());
      double sup_f = 0.0;
      for (auto& d : du) {
        d = rng.uniform(-1.0, 1.0);
        sup_f = std::max(sup_f, std::abs(d));
      }
      // piecewise-constant-on-audit difference field, bridged affinely
      const auto diff = [&](double t) {
        const auto it = std::lower_bound(audit.begin(), audit.end(), t);
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - audit.begin()),
                                               audit.size() - 1);
        return du[idx];
      };
      for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform();
        REQUIRE(std::abs(cgps::extend_multi_affine(f, diff, t)) <= sup_f + 1e-14);
      }
    }
  }
}

TEST_CASE("grid size delta_N") {
  SECTION("equispaced") {
    REQUIRE(KnotGrid::equispaced(3).delta() == Approx(0.25));
    REQUIRE(KnotGrid::equispaced(11).delta() == Approx(0.05));
  }
  SECTION("uneven") {
    const KnotGrid g({0.0, 0.1, 1.0}, DomainF::unit());
    REQUIRE(g.delta() == Approx(0.45));
  }
  SECTION("per-interval computation on a holey domain") {
    const KnotGrid g({0.0, 0.3, 0.6, 1.0}, holey());
    REQUIRE(g.delta() == Approx(0.2));
  }
  SECTION("refinement never increases delta") {
    cgps::Rng rng(29);
    KnotGrid g({0.0, 1.0}, DomainF::unit());
    double prev = g.delta();
    for (int i = 0; i < 60; ++i) {
      double t = rng.uniform();
      if (std::binary_search(g.knots().begin(), g.knots().end(), t)) continue;
      g = g.refined_with(t);
      const double d = g.delta();
      REQUIRE(d <= prev + 1e-15);
      prev = d;
    }
  }
  SECTION("midpoint doubling halves delta") {
    KnotGrid g = KnotGrid::equispaced(2);
    double prev = g.delta();
    for (int round = 0; round < 5; ++round) {
      const auto knots = g.knots();
      for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        g = g.refined_with(0.5 * (knots[i] + knots[i + 1]));
      REQUIRE(g.delta() == Approx(0.5 * prev));
      prev = g.delta();
    }
  }
}

TEST_CASE("grid invariants") {
  REQUIRE_THROWS_AS(KnotGrid({0.2, 1.0}, DomainF::unit()), std::invalid_argument);
  REQUIRE_THROWS_AS(KnotGrid({0.0, 0.9}, DomainF::unit()), std::invalid_argument);
  REQUIRE_THROWS_AS(KnotGrid({0.0, 0.4, 0.4, 1.0}, DomainF::unit()), std::invalid_argument);
  // knot inside a hole of F
  REQUIRE_THROWS_AS(KnotGrid({0.0, 0.45, 1.0}, holey()), std::invalid_argument);
  // nesting violation
  const KnotGrid parent({0.0, 0.5, 1.0}, DomainF::unit());
  REQUIRE_THROWS_AS(KnotGrid({0.0, 0.25, 1.0}, DomainF::unit(),
                             std::make_shared<KnotGrid>(parent)),
                    std::invalid_argument);
  // audit grid contains the knots exactly
  const KnotGrid g({0.0, 0.12345, 1.0}, DomainF::unit());
  const auto audit = g.audit_points();
  REQUIRE(std::binary_search(audit.begin(), audit.end(), 0.12345));
}
