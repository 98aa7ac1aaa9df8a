#include <doctest.h>

#include <cmath>

#include "warpgeom/error.hpp"
#include "warpgeom/wexpr.hpp"

using namespace warpgeom;
namespace wx = warpgeom::wexpr;

TEST_CASE("evaluation of literal expressions") {
    CHECK(wx::evaluate(wx::parse("r^2"), 3.0) == doctest::Approx(9.0));
    // sinh(1) from its Taylor series, summed by hand
    double series = 0.0, term = 1.0;
    for (int k = 1; k < 30; k += 2) {
        if (k > 1) term /= (k - 1) * k;
        series += term;
    }
    CHECK(wx::evaluate(wx::parse("sinh(r)"), 1.0) == doctest::Approx(series).epsilon(1e-14));
    CHECK(wx::evaluate(wx::parse("2*r - r/4 + (1 - r)^3"), 2.0) == doctest::Approx(4.0 - 0.5 - 1.0));
    CHECK(wx::evaluate(wx::parse("-r^2"), 3.0) == doctest::Approx(-9.0));
    CHECK(wx::evaluate(wx::parse("2^3^2"), 0.0) == doctest::Approx(512.0));
}

TEST_CASE("domain errors instead of NaN") {
    CHECK_THROWS_AS(wx::evaluate(wx::parse("ln(r)"), 0.0), DomainError);
    CHECK_THROWS_AS(wx::evaluate(wx::parse("sqrt(r)"), -1.0), DomainError);
    CHECK_THROWS_AS(wx::evaluate(wx::parse("1/r"), 0.0), DomainError);
}

TEST_CASE("parse errors carry byte offsets") {
    try {
        (void)wx::parse("sinh(r");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 6);
    }
    try {
        (void)wx::parse("r + * 2");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(wx::parse("foo(r)"), ParseError);
    CHECK_THROWS_AS(wx::parse(""), ParseError);
    CHECK_THROWS_AS(wx::parse("r r"), ParseError);
}

TEST_CASE("symbolic derivatives match central differences") {
    const char* cases[] = {"sinh(r)", "sin(r)*cos(r)", "r/(1+r)", "exp(-r^2)", "sqrt(1+r^2)", "ln(1+r)", "r^(3/2)",
                           "cosh(2*r)/2"};
    for (const char* text : cases) {
        const wx::Expr e = wx::parse(text);
        const wx::Expr d = wx::differentiate(e);
        const wx::Expr d2 = wx::differentiate(d);
        for (double r : {0.3, 1.1, 2.7}) {
            const double h = 1e-5;
            const double fd = (wx::evaluate(e, r + h) - wx::evaluate(e, r - h)) / (2 * h);
            const double fd2 = (wx::evaluate(e, r + h) - 2 * wx::evaluate(e, r) + wx::evaluate(e, r - h)) / (h * h);
            CHECK(wx::evaluate(d, r) == doctest::Approx(fd).epsilon(1e-7));
            CHECK(wx::evaluate(d2, r) == doctest::Approx(fd2).epsilon(1e-4));
        }
    }
}

TEST_CASE("printing round-trips") {
    for (const char* text : {"sinh(r)", "r - r^3/6", "(1 + r)^(-1/2)", "-sin(2*r)/2"}) {
        const wx::Expr e = wx::parse(text);
        const wx::Expr back = wx::parse(wx::print(e));
        for (double r : {0.5, 1.5})
            CHECK(wx::evaluate(back, r) == doctest::Approx(wx::evaluate(e, r)).epsilon(1e-15));
    }
}

TEST_CASE("nested fractional exponents are rejected") {
    CHECK_THROWS_AS(wx::parse("r^2^(1/2)"), ParseError);
}
