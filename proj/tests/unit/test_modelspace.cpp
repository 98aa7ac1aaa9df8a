#include <doctest.h>

#include <cmath>
#include <numbers>

#include "warpgeom/error.hpp"
#include "warpgeom/modelspace.hpp"

using namespace warpgeom;
using std::numbers::pi;

namespace {

ModelSpace euclid(int m) { return ModelSpace(m, Warping::space_form(0.0)); }
ModelSpace hyper(int m) { return ModelSpace(m, Warping::space_form(-1.0)); }

}  // namespace

TEST_CASE("Euclidean volumes") {
    const auto e2 = euclid(2);
    CHECK(e2.vol_ball(2.0) == doctest::Approx(4 * pi));
    CHECK(e2.vol_sphere(2.0) == doctest::Approx(4 * pi));
    CHECK(e2.iso_quotient(3.0) == doctest::Approx(1.5));
    const auto e3 = euclid(3);
    CHECK(e3.fiber_measure() == doctest::Approx(4 * pi));
    CHECK(e3.vol_ball(1.5) == doctest::Approx(4 * pi * 1.5 * 1.5 * 1.5 / 3));
    CHECK(euclid(4).fiber_measure() == doctest::Approx(2 * pi * pi));
}

TEST_CASE("hyperbolic and spherical planes") {
    const auto h = hyper(2);
    for (double r : {0.1, 1.0, 4.0}) {
        CHECK(h.vol_sphere(r) == doctest::Approx(2 * pi * std::sinh(r)));
        CHECK(h.vol_ball(r) == doctest::Approx(2 * pi * (std::cosh(r) - 1)));
        CHECK(h.iso_quotient(r) == doctest::Approx(std::tanh(r / 2)));
        CHECK(h.radial_curvature(r) == doctest::Approx(-1.0));  // −w''/w
    }
    const ModelSpace s(2, Warping::space_form(1.0));
    CHECK(s.warp().domain_bound() == doctest::Approx(pi));
    CHECK(s.vol_ball(2.0) == doctest::Approx(2 * pi * (1 - std::cos(2.0))));
}

TEST_CASE("custom warps go through quadrature") {
    const ModelSpace m(2, Warping::from_text("r + r^3"));
    for (double r : {0.5, 1.0, 2.0})
        CHECK(m.vol_ball(r) == doctest::Approx(2 * pi * (r * r / 2 + r * r * r * r / 4)).epsilon(1e-9));
    const ModelSpace s(2, Warping::from_text("sinh(r)"));
    CHECK(s.vol_ball(3.0) == doctest::Approx(hyper(2).vol_ball(3.0)).epsilon(1e-9));
    CHECK(s.capacity(1.0, 2.0) == doctest::Approx(hyper(2).capacity(1.0, 2.0)).epsilon(1e-9));
    const ModelSpace sn(2, Warping::from_text("sin(r)"));
    CHECK(sn.warp().domain_bound() == doctest::Approx(pi).epsilon(1e-8));
}

TEST_CASE("warp validation") {
    CHECK_THROWS_AS(Warping::from_text("r^2"), PreconditionError);
    CHECK_THROWS_AS(Warping::from_text("1 + r"), PreconditionError);
    CHECK_THROWS_AS(Warping::from_text("r +"), ParseError);
    CHECK_THROWS_AS(ModelSpace(1, Warping::space_form(0)), PreconditionError);
}

TEST_CASE("radius grids") {
    const auto g = RadiusGrid::parse("1:3:5");
    REQUIRE(g.size() == 5);
    CHECK(g.radii[1] == doctest::Approx(1.5));
    CHECK(g.radii.back() == 3.0);
    CHECK_THROWS_AS(RadiusGrid::parse("3:1:5"), PreconditionError);
    CHECK_THROWS_AS(RadiusGrid::parse("1:3"), PreconditionError);
    CHECK_THROWS_AS(RadiusGrid::parse("1:3:x"), PreconditionError);
}

TEST_CASE("balance from below and above") {
    const auto grid = RadiusGrid::linspace(0.05, 3.0, 60);
    const auto e = euclid(2).balance_check(grid);
    CHECK(e.below);
    CHECK(e.worst_below_margin == doctest::Approx(0.0).epsilon(1e-9));
    // q·η = (1 + tanh²(r/2))/2 for the hyperbolic plane
    const auto h = hyper(2).balance_check(grid);
    CHECK(h.below);
    CHECK(h.above);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = std::tanh(grid.radii[i] / 2);
        CHECK(h.products[i] == doctest::Approx((1 + t * t) / 2));
    }
    // q·η = (1 − tan²(r/2))/2 < 1/2 on the sphere
    const ModelSpace s(2, Warping::space_form(1.0));
    CHECK_FALSE(s.balance_check(RadiusGrid::linspace(0.1, 1.5, 20)).below);
}

TEST_CASE("capacity and potential") {
    CHECK(euclid(2).capacity(1.0, std::exp(1.0)) == doctest::Approx(2 * pi));
    CHECK(euclid(3).capacity(1.0, 2.0) == doctest::Approx(4 * pi / (1.0 - 0.5)));
    // ∫ ds/sinh s = ln tanh(s/2)
    const double oracle = 2 * pi / (std::log(std::tanh(1.0)) - std::log(std::tanh(0.5)));
    CHECK(hyper(2).capacity(1.0, 2.0) == doctest::Approx(oracle));
    CHECK(oracle == doctest::Approx(12.5765).epsilon(1e-4));
    CHECK(euclid(2).potential(1.0, 4.0, 2.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(euclid(2).capacity(2.0, 1.0), PreconditionError);
}

TEST_CASE("mean exit time") {
    CHECK(euclid(2).mean_exit_time(2.0, 0.0) == doctest::Approx(1.0));
    CHECK(euclid(2).mean_exit_time(2.0, 1.0) == doctest::Approx(0.75));
    CHECK(euclid(3).mean_exit_time(3.0, 0.0) == doctest::Approx(1.5));
    CHECK(euclid(2).mean_exit_time(2.0, 2.0) == 0.0);
}

TEST_CASE("parabolicity") {
    CHECK(euclid(2).parabolicity().verdict == Parabolicity::Parabolic);
    CHECK(euclid(3).parabolicity().verdict == Parabolicity::Hyperbolic);
    CHECK(hyper(2).parabolicity().verdict == Parabolicity::Hyperbolic);
}

TEST_CASE("tone, Cheeger bound and ends coefficient") {
    const auto grid = RadiusGrid::linspace(1.0, 30.0, 59);
    const auto tone = hyper(2).tone_upper_limit(grid);
    CHECK(tone.reported == doctest::Approx(1.0).epsilon(1e-3));
    const auto ch = hyper(2).cheeger_bound(grid);
    CHECK(ch.L == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ch.lower_bound == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(euclid(2).tone_upper_limit(grid).reported == 0.0);
    CHECK(euclid(2).cheeger_bound(grid).lower_bound == 0.0);
    const auto cw = euclid(2).ends_coefficient(grid);
    CHECK(cw.reported == doctest::Approx(1.0));
    CHECK_FALSE(cw.divergent);
    CHECK(hyper(2).ends_coefficient(grid).divergent);
    CHECK(euclid(2).check_q_linear_bound(grid));
}
