#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warpgeom/geometry.hpp"

namespace warpgeom {

enum class VertexTag : std::uint8_t { Interior, OuterTruncation, Seam };

/// Immersed triangulated surface in R³ with extrinsic distance to a pole.
///
/// Invariants (checked by validate()): triangles reference three distinct
/// valid vertices, every edge has at most two incident triangles, shared
/// edges are traversed in opposite directions, and r[i] == |x_i − pole|.
struct TriMesh {
    std::vector<Vec3> positions;
    std::vector<Tri> triangles;
    std::vector<double> r;
    std::vector<VertexTag> tags;
    Vec3 pole{};
    std::string label;

    std::size_t vertex_count() const { return positions.size(); }
    std::size_t face_count() const { return triangles.size(); }

    void recompute_radii();
    double max_radius() const;
    /// Smallest r over outer-truncation vertices (+∞ for closed meshes).
    double min_truncation_radius() const;
    double total_area() const;
    /// Content hash of positions, triangles and pole (FNV-1a).
    std::uint64_t fingerprint() const;
    void validate() const;
};

/// Builds a TriMesh from raw data: computes r, tags boundary-edge vertices as
/// outer truncation and validates.
TriMesh make_mesh(std::vector<Vec3> positions, std::vector<Tri> triangles, Vec3 pole, std::string label);

struct ParamSurface {
    std::string name;
    std::function<Vec3(double, double)> map;
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
    bool periodic_u = false;
    bool periodic_v = false;
    std::map<std::string, double> params;

    Vec3 operator()(double u, double v) const { return map(u, v); }
    /// Samples the Jacobian on an interior lattice; throws PreconditionError
    /// where ∂u × ∂v vanishes.
    void validate_immersion(int samples = 24) const;
};

/// plane (extent), catenoid (a, vmax), helicoid (c, umax, vmax), enneper (extent).
ParamSurface builtin_surface(std::string_view name, const std::map<std::string, double>& params = {});

/// Regular nu × nv grid split into triangles, periodic axes stitched, one
/// round of 1-to-4 refinement (with conforming closure) on triangles whose
/// r-range contains a radius in `refine_near`.
TriMesh tessellate(const ParamSurface& s, int nu, int nv, std::span<const double> refine_near = {},
                   Vec3 pole = {});

/// 95th percentile over non-truncation vertices of |Δx|, the cotangent
/// Laplacian of the coordinate functions normalized by the barycentric cell
/// area (equals 2|H| for mean curvature H).
double minimality_residual(const TriMesh& mesh);

/// Per-vertex barycentric area (one third of the one-ring area).
std::vector<double> barycentric_areas(const TriMesh& mesh);

}  // namespace warpgeom
