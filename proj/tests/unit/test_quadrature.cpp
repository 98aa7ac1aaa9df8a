#include <doctest.h>

#include <cmath>
#include <numbers>

#include "warpgeom/error.hpp"
#include "warpgeom/quadrature.hpp"

using namespace warpgeom;

TEST_CASE("finite intervals") {
    QuadratureConfig q;
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, q).value ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q).value ==
          doctest::Approx(2.0).epsilon(1e-8));
    CHECK(integrate([](double x) { return x * x; }, 2.0, 2.0, q).value == 0.0);
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0, q).value == doctest::Approx(-0.5));
}

TEST_CASE("improper tails keep relative accuracy") {
    QuadratureConfig q;
    // ∫_a^∞ e^{-s} = e^{-a}, tiny but still resolved relatively
    const double a = 30.0;
    CHECK(integrate_to_infinity([](double s) { return std::exp(-s); }, a, q).value ==
          doctest::Approx(std::exp(-a)).epsilon(1e-8));
    CHECK(integrate_to_infinity([](double s) { return 1.0 / (s * s); }, 2.0, q).value ==
          doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("budget exhaustion reports the achieved error") {
    QuadratureConfig q;
    q.max_subdivisions = 3;
    q.abs_tol = q.rel_tol = 1e-15;
    try {
        (void)integrate([](double x) { return std::sin(1.0 / x); }, 1e-4, 1.0, q);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.achieved() > 0.0);
    }
}

TEST_CASE("config validation") {
    QuadratureConfig q;
    q.rel_tol = -1;
    CHECK_THROWS_AS(q.validate(), PreconditionError);
}
