#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "cgps/kernel.hpp"
#include "cgps/rng.hpp"

using Catch::Approx;
using cgps::Kernel;

TEST_CASE("Matern 1/2 closed form") {
  const Kernel k = Kernel::matern(1.0, 0.4, 0.5);
  REQUIRE(k(0.0, 0.4) == Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("stationarity: K(t,t) = sigma2 exactly") {
  const std::vector<Kernel> kernels = {
      Kernel::matern(1.7, 0.4, 0.5), Kernel::matern(0.3, 0.8, 0.25),
      Kernel::matern(2.0, 0.4, 2.5), Kernel::squared_exponential(1.2, 0.4)};
  for (const auto& k : kernels)
    for (double t : {0.0, 0.31, 0.72, 1.0}) REQUIRE(k(t, t) == k.sigma2());
}

TEST_CASE("symmetry") {
  const Kernel k = Kernel::matern(1.0, 0.8, 0.375);
  cgps::Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    REQUIRE(k(a, b) == k(b, a));
  }
}

TEST_CASE("general Bessel path matches the nu = 5/2 closed form") {
  const Kernel k = Kernel::matern(1.0, 0.8, 2.5);
  // Frozen high-precision value at r = 0.2.
  REQUIRE(k(0.0, 0.2) == Approx(0.95095992167863292).epsilon(1e-13));
  for (double r : {0.05, 0.2, 0.5, 0.93}) {
    REQUIRE(k.matern_general(r) == Approx(k.eval_r(r)).epsilon(1e-10));
  }
  const Kernel k2 = Kernel::matern(1.3, 0.4, 0.5);
  for (double r : {0.05, 0.2, 0.5, 0.93})
    REQUIRE(k2.matern_general(r) == Approx(k2.eval_r(r)).epsilon(1e-10));
}

TEST_CASE("gram basics") {
  const Kernel k = Kernel::matern(1.0, 0.4, 0.5);
  SECTION("single knot") {
    const auto f = cgps::gram(k, {0.5});
    REQUIRE(f.gamma.rows() == 1);
    REQUIRE(f.gamma(0, 0) == 1.0);
  }
  SECTION("two knots closed form") {
    const auto f = cgps::gram(k, {0.0, 0.4});
    REQUIRE(f.gamma(0, 1) == Approx(std::exp(-1.0)).epsilon(1e-14));
    REQUIRE(f.gamma(1, 0) == f.gamma(0, 1));
    REQUIRE_FALSE(f.jitter_applied);
  }
  SECTION("non-increasing knots rejected") {
    REQUIRE_THROWS_AS(cgps::gram(k, {0.4, 0.4}), std::invalid_argument);
    REQUIRE_THROWS_AS(cgps::gram(k, {0.4, 0.1}), std::invalid_argument);
  }
}

TEST_CASE("gram factorizes without jitter at N = 50 for the experiment kernels") {
  std::vector<double> knots(50);
  for (int i = 0; i < 50; ++i) knots[i] = i / 49.0;
  const std::vector<Kernel> kernels = {
      Kernel::matern(1.0, 0.8, 0.25), Kernel::matern(1.0, 0.8, 0.375),
      Kernel::matern(1.0, 0.8, 0.5),  Kernel::matern(1.0, 0.8, 0.75),
      Kernel::matern(1.0, 0.4, 2.5),  Kernel::matern(1.0, 0.8, 2.5)};
  for (const auto& k : kernels) {
    const auto f = cgps::gram(k, knots);
    REQUIRE_FALSE(f.jitter_applied);
  }
}

TEST_CASE("holder beta values") {
  REQUIRE(Kernel::matern(1.0, 0.8, 0.25).beta() == Approx(0.5));
  REQUIRE(Kernel::matern(1.0, 0.8, 0.375).beta() == Approx(0.75));
  REQUIRE(Kernel::matern(1.0, 0.8, 0.5).beta() == Approx(1.0));
  REQUIRE(Kernel::matern(1.0, 0.4, 2.5).beta() == Approx(1.0));
  REQUIRE(Kernel::squared_exponential(1.0, 0.4).beta() == Approx(1.0));
}

TEST_CASE("c_K estimate for Matern 1/2 with unit parameters") {
  // Brute-force oracle for the Lipschitz quotient of k(r) = exp(-r): the sup
  // of |e^-s - e^-t| / |s - t| is 1, attained as both points approach 0.
  const int n = 2000;
  double oracle = 0.0;
  std::vector<double> prof(n + 1);
  for (int i = 0; i <= n; ++i) prof[i] = std::exp(-static_cast<double>(i) / n);
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= std::min(i + 40, n); ++j)
      oracle = std::max(oracle, std::abs(prof[i] - prof[j]) / ((j - i) / static_cast<double>(n)));
  REQUIRE(oracle == Approx(1.0).epsilon(2e-3));

  const auto hp = Kernel::matern(1.0, 1.0, 0.5).holder_params();
  REQUIRE(hp.beta == Approx(1.0));
  REQUIRE(hp.c_K >= 1.0);
  REQUIRE(hp.c_K <= 1.05);
}

TEST_CASE("Holder inequality holds with the estimated c_K on random triples") {
  const std::vector<Kernel> kernels = {
      Kernel::matern(1.0, 0.8, 0.25), Kernel::matern(1.0, 0.8, 0.375),
      Kernel::matern(1.0, 0.4, 0.5),  Kernel::matern(1.0, 0.8, 0.75),
      Kernel::matern(1.0, 0.4, 2.5),  Kernel::squared_exponential(1.0, 0.4)};
  for (const auto& k : kernels) {
    const auto hp = k.holder_params();
    cgps::Rng rng(42);
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform(), s = rng.uniform(), t = rng.uniform();
      const double lhs = std::abs(k(u, s) - k(u, t));
      REQUIRE(lhs <= hp.c_K * std::pow(std::abs(s - t), hp.beta) + 1e-14);
    }
  }
}
