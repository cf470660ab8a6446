#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pwc/errors.hpp"
#include "pwc/quadrature.hpp"

using namespace pwc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("gauss-kronrod rule integrates polynomials exactly") {
  // The 21-point Kronrod rule is exact through degree 31.
  for (int p : {0, 1, 7, 18, 30}) {
    const auto res = integrate([p](double x) { return std::pow(x, p); }, {-1.0, 1.0});
    const double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
    CHECK(res.value == doctest::Approx(exact).epsilon(1e-15));
    // Gauss 10-point is exact through degree 19, so the error estimate vanishes there.
    if (p <= 19) CHECK(res.subdivisions == 1);
  }
}

TEST_CASE("quad_oracle basic values") {
  const QuadratureSpec spec;
  const Interval half{-kPi / 2, kPi / 2};
  CHECK(quad_oracle(TrigRationalIntegrand{0, 0, 0.0, 1.0, 0}, half, spec) ==
        doctest::Approx(kPi).epsilon(1e-14));
  // odd in theta
  CHECK(std::abs(quad_oracle(TrigRationalIntegrand{0, 1, 0.3, 1.0, 2}, half, spec)) < 1e-14);
  // cos^3 over the half period is 4/3
  CHECK(quad_oracle(TrigRationalIntegrand{3, 0, 0.0, 1.0, 0}, half, spec) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("quadrature reports non-convergence") {
  QuadratureSpec spec;
  spec.max_subdivisions = 3;
  // integrable singularity needs far more than three panels
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(x); }, {0.0, 1.0}, spec),
                  NonConvergenceError);
}

TEST_CASE("quadrature rejects a relative tolerance below 100 eps") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-16;
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, {0.0, 1.0}, spec),
                  std::invalid_argument);
}
