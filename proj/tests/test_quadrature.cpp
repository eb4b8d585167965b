#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fdpc/quadrature.hpp"

using fdpc::integrate;
using fdpc::integrate_left_graded;
using fdpc::integrate_semi_infinite;
using fdpc::QuadratureSpec;

TEST_CASE("polynomials and smooth integrands", "[quadrature]") {
  REQUIRE(integrate([](double x) { return x * x; }, 0.0, 3.0) == Catch::Approx(9.0).epsilon(1e-12));
  REQUIRE(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
          Catch::Approx(2.0).epsilon(1e-10));
  REQUIRE(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("adaptive refinement handles sharp peaks", "[quadrature]") {
  // narrow Gaussian: a single 15-point panel gets this badly wrong, the
  // refinement has to localize it
  const double v = integrate(
      [](double x) { return std::exp(-1000.0 * (x - 0.3) * (x - 0.3)); }, 0.0, 1.0,
      QuadratureSpec{1e-10, 0.0});
  REQUIRE(v == Catch::Approx(std::sqrt(std::numbers::pi / 1000.0)).epsilon(1e-9));
  // peak symmetric about the midpoint of the range (a bisection boundary)
  const double w = integrate(
      [](double x) { return std::exp(-200.0 * x * x); }, -10.0, 10.0, QuadratureSpec{1e-10, 0.0});
  REQUIRE(w == Catch::Approx(std::sqrt(std::numbers::pi / 200.0)).epsilon(1e-8));
}

TEST_CASE("left-graded ladder resolves endpoint boundary layers", "[quadrature]") {
  // layer of width 1e-4 at the left end of a width-60 range: a uniform
  // initial panel has no node inside it
  const double v = integrate_left_graded(
      [](double x) { return std::exp(-1e8 * x * x); }, 0.0, 60.0, QuadratureSpec{1e-10, 0.0});
  REQUIRE(v == Catch::Approx(0.5 * std::sqrt(std::numbers::pi) / 1e4).epsilon(1e-9));
  // and it stays exact for ordinary integrands
  REQUIRE(integrate_left_graded([](double x) { return x * x; }, 0.0, 3.0) ==
          Catch::Approx(9.0).epsilon(1e-11));
}

TEST_CASE("integrable endpoint singularity", "[quadrature]") {
  const double v = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                             QuadratureSpec{1e-9, 0.0, 20000});
  REQUIRE(v == Catch::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("semi-infinite transform", "[quadrature]") {
  REQUIRE(integrate_semi_infinite([](double x) { return std::exp(-x); }) ==
          Catch::Approx(1.0).epsilon(1e-10));
  // scale far from 1 still converges via the scale hint
  const double c = 1e-8;
  const double v = integrate_semi_infinite([c](double x) { return std::exp(-c * x); }, 1.0 / c);
  REQUIRE(v == Catch::Approx(1.0 / c).epsilon(1e-9));
  // Gamma(1.5) = sqrt(pi)/2
  const double g = integrate_semi_infinite(
      [](double x) { return std::sqrt(x) * std::exp(-x); }, 1.0, QuadratureSpec{1e-10, 0.0});
  REQUIRE(g == Catch::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("non-convergence raises with the achieved error", "[quadrature]") {
  // interval budget too small for the requested tolerance on a hard integrand
  bool threw = false;
  try {
    (void)integrate([](double x) { return std::sin(1.0 / x) / std::sqrt(x); }, 1e-12, 1.0,
                    QuadratureSpec{1e-14, 0.0, 8});
  } catch (const fdpc::QuadratureError& e) {
    threw = true;
    REQUIRE(e.achieved_error > e.requested_tolerance);
  }
  REQUIRE(threw);
}
