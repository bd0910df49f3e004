#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "cgps/bessel.hpp"
#include "oracles.hpp"

using Catch::Approx;

namespace {
double half_integer_K(int half_twice, double x) {
  // K_{1/2} = sqrt(pi/2x) e^-x; K_{5/2} = sqrt(pi/2x) e^-x (1 + 3/x + 3/x^2)
  const double base = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x);
  switch (half_twice) {
    case 1: return base;
    case 3: return base * (1.0 + 1.0 / x);
    case 5: return base * (1.0 + 3.0 / x + 3.0 / (x * x));
    default: throw std::logic_error("unsupported order");
  }
}
}  // namespace

TEST_CASE("closed form K_{ 1/2 }") {
  REQUIRE(cgps::bessel_K(0.5, 1.0) == Approx(std::sqrt(M_PI / 2.0) * std::exp(-1.0)).epsilon(1e-13));
  REQUIRE(cgps::bessel_K(0.5, 1.0) == Approx(0.46106850444789456).epsilon(1e-13));
}

TEST_CASE("half-integer orders match the polynomial-times-exponential forms") {
  for (double x : {0.1, 1.0, 5.0}) {
    REQUIRE(cgps::bessel_K(2.5, x) == Approx(half_integer_K(5, x)).epsilon(1e-12));
    REQUIRE(cgps::bessel_K(1.5, x) == Approx(half_integer_K(3, x)).epsilon(1e-12));
  }
}

TEST_CASE("fractional order against the quadrature oracle") {
  // Frozen from the adaptive quadrature of K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt.
  const double frozen = 0.43073977444858552;
  REQUIRE(oracles::bessel_K_quadrature(0.25, 1.0) == Approx(frozen).epsilon(1e-12));
  REQUIRE(cgps::bessel_K(0.25, 1.0) == Approx(frozen).epsilon(1e-11));

  for (double nu : {0.25, 0.375, 0.75, 1.2, 3.3, 7.9}) {
    for (double x : {1e-6, 1e-3, 0.3, 1.9, 2.1, 7.0, 50.0}) {
      const double oracle = oracles::bessel_K_quadrature(nu, x);
      REQUIRE(cgps::bessel_K(nu, x) == Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("recurrence K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu") {
  for (double nu : {0.3, 0.7, 1.1, 2.6, 4.9}) {
    for (double x : {0.05, 0.8, 2.0, 9.0, 40.0}) {
      const double lhs = cgps::bessel_K(nu + 1.0, x);
      const double rhs = cgps::bessel_K(nu, x) * (2.0 * nu / x) +
                         ((nu - 1.0 > 0.0) ? cgps::bessel_K(nu - 1.0, x)
                                           : cgps::bessel_K(1.0 - nu, x));
      REQUIRE(lhs == Approx(rhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("domain errors") {
  REQUIRE_THROWS_AS(cgps::bessel_K(0.5, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(cgps::bessel_K(0.5, -1.0), std::domain_error);
  REQUIRE_THROWS_AS(cgps::bessel_K(0.0, 1.0), std::domain_error);
  REQUIRE_THROWS_AS(cgps::bessel_K(10.5, 1.0), std::domain_error);
}
