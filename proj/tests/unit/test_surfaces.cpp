#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "warpgeom/error.hpp"
#include "warpgeom/mesh_io.hpp"
#include "warpgeom/surfaces.hpp"

using namespace warpgeom;
using std::numbers::pi;

TEST_CASE("plane tessellation is exact") {
    const auto mesh = tessellate(builtin_surface("plane"), 16, 16);
    CHECK(mesh.vertex_count() == 17 * 17);
    CHECK(mesh.face_count() == 2 * 16 * 16);
    CHECK(mesh.total_area() == doctest::Approx(64.0));
    CHECK(mesh.min_truncation_radius() == doctest::Approx(4.0));
    CHECK(mesh.max_radius() == doctest::Approx(4.0 * std::sqrt(2.0)));
    CHECK(minimality_residual(mesh) == doctest::Approx(0.0));
    mesh.validate();
}

TEST_CASE("catenoid area converges to the closed form") {
    // area element a² cosh² v, so A = 2π a² (V + sinh(2V)/2)
    const double V = 1.5;
    const auto s = builtin_surface("catenoid", {{"a", 1.0}, {"vmax", V}});
    const double exact = 2 * pi * (V + std::sinh(2 * V) / 2);
    const double coarse = tessellate(s, 32, 32).total_area();
    const double fine = tessellate(s, 64, 64).total_area();
    CHECK(fine == doctest::Approx(exact).epsilon(2e-3));
    CHECK(std::abs(fine - exact) < 0.5 * std::abs(coarse - exact));
}

TEST_CASE("builtin surfaces are nearly minimal, a sphere is not") {
    for (const char* name : {"catenoid", "helicoid", "enneper"}) {
        const auto s = builtin_surface(name);
        s.validate_immersion();
        const auto mesh = tessellate(s, 96, 96);
        mesh.validate();
        CHECK(minimality_residual(mesh) < 0.1);
    }
    ParamSurface sphere;
    sphere.name = "sphere";
    sphere.map = [](double u, double v) {
        return Vec3{std::sin(v) * std::cos(u), std::sin(v) * std::sin(u), std::cos(v)};
    };
    sphere.u0 = 0;
    sphere.u1 = 2 * pi;
    sphere.periodic_u = true;
    sphere.v0 = 0.5;
    sphere.v1 = 2.5;
    // unit sphere: H = 1, so |Δx| = 2
    CHECK(minimality_residual(tessellate(sphere, 96, 64)) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("surface parameter validation") {
    CHECK_THROWS_AS(builtin_surface("torus"), PreconditionError);
    CHECK_THROWS_AS(builtin_surface("catenoid", {{"a", -1.0}}), PreconditionError);
    CHECK_THROWS_AS(builtin_surface("plane", {{"radius", 2.0}}), PreconditionError);
    CHECK_THROWS_AS(tessellate(builtin_surface("plane"), 4, 16), PreconditionError);
    const auto s = builtin_surface("helicoid");
    CHECK(s.params.at("umax") == doctest::Approx(2 * pi));
}

TEST_CASE("refinement near a radius keeps the mesh conforming") {
    const double near[] = {2.0};
    const auto base = tessellate(builtin_surface("plane"), 16, 16);
    const auto refined = tessellate(builtin_surface("plane"), 16, 16, near);
    refined.validate();
    CHECK(refined.face_count() > base.face_count());
    CHECK(refined.total_area() == doctest::Approx(64.0));
}

TEST_CASE("OFF round trip preserves the fingerprint") {
    const auto mesh = tessellate(builtin_surface("catenoid", {{"vmax", 1.0}}), 12, 8);
    std::stringstream ss;
    write_off(mesh, ss);
    const auto back = read_off(ss);
    CHECK(back.vertex_count() == mesh.vertex_count());
    CHECK(back.face_count() == mesh.face_count());
    CHECK(back.fingerprint() == mesh.fingerprint());
    CHECK(back.total_area() == doctest::Approx(mesh.total_area()));
}

TEST_CASE("OBJ polygons are fan triangulated") {
    std::istringstream in(
        "# unit square\n"
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
        "vn 0 0 1\n"
        "f 1//1 2//1 3//1 4//1\n");
    const auto mesh = read_obj(in, Vec3{0.5, 0.5, 0.0});
    CHECK(mesh.face_count() == 2);
    CHECK(mesh.total_area() == doctest::Approx(1.0));
    CHECK(mesh.r[0] == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("malformed files report line numbers") {
    std::istringstream bad("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
    try {
        (void)read_off(bad);
        FAIL("expected MeshError");
    } catch (const MeshError& e) {
        CHECK(e.line() == 6);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(read_off(empty), MeshError);
    std::istringstream badnum("v 0 0 zero\n");
    CHECK_THROWS_AS(read_obj(badnum), MeshError);
    CHECK_THROWS_AS(parse_mesh_format("stl"), PreconditionError);
    CHECK(parse_mesh_format("obj") == MeshFormat::Obj);
}

TEST_CASE("non-manifold edges are rejected") {
    // three triangles share the edge 0-1
    std::istringstream in("OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n");
    try {
        (void)read_off(in);
        FAIL("expected NonManifoldError");
    } catch (const NonManifoldError& e) {
        REQUIRE_FALSE(e.edges().empty());
        CHECK(e.edges().front() == std::pair<int, int>{0, 1});
    }
}

TEST_CASE("minimality residual shrinks under refinement") {
    for (const char* name : {"catenoid", "helicoid", "enneper"}) {
        const auto s = builtin_surface(name);
        const double coarse = minimality_residual(tessellate(s, 48, 48));
        const double fine = minimality_residual(tessellate(s, 96, 96));
        CHECK_MESSAGE(fine <= coarse / 2, name);
    }
}
