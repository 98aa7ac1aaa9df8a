#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warpgeom/error.hpp"
#include "warpgeom/harness.hpp"
#include "warpgeom/report.hpp"

using namespace warpgeom;
using std::numbers::pi;

namespace {

const TriMesh& plane_mesh() {
    static const TriMesh mesh = tessellate(builtin_surface("plane"), 96, 96);
    return mesh;
}

const TriMesh& catenoid_mesh() {
    static const TriMesh mesh = tessellate(builtin_surface("catenoid"), 128, 128);
    return mesh;
}

ModelSpace flat() { return ModelSpace(2, Warping::space_form(0.0)); }

const Check& find(const std::vector<Check>& checks, const std::string& id) {
    const auto it = std::find_if(checks.begin(), checks.end(), [&](const Check& c) { return c.id == id; });
    REQUIRE(it != checks.end());
    return *it;
}

QuotientCurve synthetic(std::vector<double> vq, std::vector<double> fq) {
    QuotientCurve c;
    for (std::size_t i = 0; i < vq.size(); ++i) c.radii.push_back(1.0 + i);
    c.volume_quotient = std::move(vq);
    c.flux_quotient = std::move(fq);
    c.volume = c.model_volume = c.flux = c.model_flux = std::vector<double>(c.radii.size(), 1.0);
    return c;
}

}  // namespace

TEST_CASE("hypothesis gates") {
    const ModelSpace hyp(2, Warping::space_form(-1.0));
    CHECK(gate_balanced_below(hyp, 5.0).holds);
    CHECK_FALSE(gate_curvature_bound(hyp, 5.0).holds);  // w'' = sinh > 0
    CHECK(gate_curvature_bound(flat(), 5.0).holds);
    CHECK(gate_w_prime(flat(), 5.0, true).holds);
    const ModelSpace sph(2, Warping::space_form(1.0));
    CHECK_FALSE(gate_balanced_below(sph, 3.0).holds);
    CHECK_FALSE(gate_w_prime(sph, 3.0, false).holds);
    CHECK(gate_nonpositive_model_curvature(flat(), 1.0, 4.0).holds);
    CHECK(gate_pole_on_surface(plane_mesh()).holds);
    CHECK_FALSE(gate_pole_on_surface(catenoid_mesh()).holds);
}

TEST_CASE("plane quotients equal one") {
    const auto curve = quotient_curves(plane_mesh(), flat(), RadiusGrid::linspace(0.5, 3.5, 7));
    for (std::size_t i = 0; i < curve.radii.size(); ++i) {
        CHECK(curve.volume_quotient[i] == doctest::Approx(1.0).epsilon(5e-3));
        CHECK(curve.flux_quotient[i] == doctest::Approx(1.0).epsilon(5e-3));
    }
    for (const auto& c : verify_isoperimetric(curve)) CHECK(c.verdict == Verdict::Pass);
    CHECK(verify_flux_eq_volume(curve).front().verdict == Verdict::Pass);
    CHECK_THROWS_AS(quotient_curves(plane_mesh(), flat(), RadiusGrid::linspace(1, 6, 3)), CoverageError);
}

TEST_CASE("tampered curves fail") {
    // flux quotient pushed below the volume quotient at one radius
    auto bad = synthetic({1.0, 1.1, 1.2, 1.3}, {1.0, 1.1, 1.05, 1.3});
    const auto checks = verify_isoperimetric(bad);
    const auto& vf = find(checks, "isoperimetric.volume-vs-flux");
    CHECK(vf.verdict == Verdict::Fail);
    REQUIRE(vf.at);
    CHECK(*vf.at == 3.0);
    CHECK(vf.margin < -vf.tolerance);
    CHECK(find(checks, "isoperimetric.flux-monotone").verdict == Verdict::Fail);
    CHECK(find(checks, "isoperimetric.volume-monotone").verdict == Verdict::Pass);

    auto good = synthetic({1.0, 1.1, 1.2, 1.3}, {1.0, 1.15, 1.25, 1.3});
    for (const auto& c : verify_isoperimetric(good)) CHECK(c.verdict == Verdict::Pass);

    auto negative = synthetic({1.0, -0.1}, {1.0, 1.0});
    CHECK_THROWS_AS(verify_isoperimetric(negative), PreconditionError);
}

TEST_CASE("catenoid against the flat model") {
    const auto& mesh = catenoid_mesh();
    const auto curve = quotient_curves(mesh, flat(), RadiusGrid::linspace(2.0, 20.0, 10));
    // total curvature -8π: the quotient climbs toward two
    CHECK(curve.volume_quotient.back() > 1.9);
    CHECK(curve.volume_quotient.back() < 2.0);
    for (const auto& c : verify_isoperimetric(curve)) CHECK(c.verdict == Verdict::Pass);
    CHECK(verify_flux_eq_volume(curve).front().verdict == Verdict::Pass);

    const auto cap = verify_capacity_sandwich(mesh, flat(), 1.5, 6.0);
    CHECK(find(cap, "capacity.upper").verdict == Verdict::Pass);
    CHECK(find(cap, "capacity.lower").verdict == Verdict::Inconclusive);  // pole off the surface
    for (const auto& c : verify_euclidean_sandwich(mesh, 1.5, 6.0)) CHECK(c.verdict == Verdict::Pass);
    for (const auto& c : exit_time_comparison(mesh, flat(), 6.0)) CHECK(c.verdict == Verdict::Pass);
}

TEST_CASE("a hyperbolic model gates the Euclidean checks") {
    const ModelSpace hyp(2, Warping::from_text("sinh(r)"));
    const auto curve = quotient_curves(catenoid_mesh(), hyp, RadiusGrid::linspace(2.0, 6.0, 5));
    for (const auto& c : verify_isoperimetric(curve)) {
        CHECK(c.verdict == Verdict::Inconclusive);
        CHECK(c.note.find("hypothesis failed") != std::string::npos);
    }
    CHECK(verify_flux_eq_volume(curve).front().verdict == Verdict::Inconclusive);
}

TEST_CASE("ends bound") {
    const auto plane = ends_bound(plane_mesh(), flat(), 1.0, 3.5);
    CHECK(plane.ends.count == 1);
    CHECK(plane.verdict == Verdict::Pass);
    CHECK(plane.bound >= 1.0);
    CHECK(plane.bound_unit_constant == doctest::Approx(plane.bound / 4));
    const auto cat = ends_bound(catenoid_mesh(), flat(), 2.0, 20.0);
    CHECK(cat.ends.count == 2);
    CHECK(cat.verdict == Verdict::Pass);
    REQUIRE(cat.asymptotic_bound);
    CHECK(*cat.asymptotic_bound >= 2.0);
}

TEST_CASE("model-only tone report") {
    const ModelSpace hyp(2, Warping::from_text("sinh(r)"));
    const auto t = tone_report(nullptr, hyp, 1.0, {});
    CHECK(t.upper == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(t.lower == doctest::Approx(0.25).epsilon(1e-4));
    REQUIRE(t.factor);
    CHECK(*t.factor == 1.0);
    const auto e = tone_report(nullptr, flat(), 1.0, {});
    CHECK(e.upper == 0.0);
    CHECK(e.lower == 0.0);
    CHECK(e.parabolicity == Parabolicity::Parabolic);
}

TEST_CASE("tone report with discrete eigenvalues") {
    const auto t = tone_report(&plane_mesh(), flat(), 1.0, RadiusGrid::linspace(1.0, 3.0, 3));
    REQUIRE(t.lambda.size() == 3);
    const double j01 = 2.404825557695773;
    CHECK(t.lambda[0] == doctest::Approx(j01 * j01).epsilon(0.02));
    CHECK(t.lambda[2] == doctest::Approx(j01 * j01 / 9).epsilon(0.02));
    for (const auto& c : t.checks) CHECK(c.verdict == Verdict::Pass);
}

TEST_CASE("volume flux tail") {
    const auto curve = quotient_curves(plane_mesh(), flat(), RadiusGrid::linspace(0.5, 3.5, 12));
    CHECK(volume_flux_tail(curve).verdict == Verdict::Pass);
    // still rising at the top of the grid: no estimate of the limit
    auto rising = synthetic({1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8},
                            {1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8});
    CHECK(volume_flux_tail(rising).verdict == Verdict::Inconclusive);
}

TEST_CASE("suite and report serialization are deterministic") {
    SuiteConfig cfg;
    cfg.grid = RadiusGrid::linspace(0.5, 3.0, 6);
    cfg.rho = 1.0;
    cfg.R = 3.0;
    cfg.ends_R = 1.0;
    cfg.ends_t = 3.5;
    cfg.R0 = 1.0;
    HarnessOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const auto a = run_suite(plane_mesh(), flat(), cfg, one);
    const auto b = run_suite(plane_mesh(), flat(), cfg, many);
    CHECK(a.report.count(Verdict::Fail) == 0);
    CHECK_FALSE(a.report.failed(false));
    CHECK(a.report.not_testable.size() == 1);
    const auto ja = dump(to_json(a.report));
    CHECK(ja == dump(to_json(b.report)));
    CHECK(to_json(a.report)["summary"]["fail"] == 0);
}

TEST_CASE("non-finite numbers serialize as strings") {
    CHECK(number_json(kInfinity) == "inf");
    CHECK(number_json(-kInfinity) == "-inf");
    CHECK(number_json(std::nan("")) == "nan");
    CHECK(number_json(1.5) == 1.5);
}
