#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpgeom/sparse.hpp"
#include "warpgeom/surfaces.hpp"

namespace warpgeom {

/// |∇^P r| on a face: the unit radial vector at the centroid projected onto
/// the face plane. Throws MeshError for a degenerate face and
/// PreconditionError when the centroid coincides with the pole.
double radial_gradient_norm(const TriMesh& mesh, int face);

enum class RegionVertexKind : std::uint8_t { Original, InnerLevel, OuterLevel };
enum class LoopLabel : std::uint8_t { Inner, Outer, Truncation };

std::string to_string(LoopLabel label);

struct BoundaryLoop {
    LoopLabel label = LoopLabel::Outer;
    std::vector<int> vertices;
    bool closed = false;
};

/// Extrinsic annulus {ρ ≤ r < R} (a ball when ρ = 0) cut out of a mesh.
/// Vertices on a level line carry the interpolated r, i.e. exactly ρ or R.
struct ClippedRegion {
    std::vector<Vec3> positions;
    std::vector<double> r;
    std::vector<RegionVertexKind> kind;
    std::vector<char> on_truncation;  // lies on the parent's truncation boundary
    std::vector<Tri> triangles;
    std::vector<int> parent_face;
    std::vector<BoundaryLoop> loops;
    double rho = 0.0;
    double R = 0.0;
    std::uint64_t parent_id = 0;
    std::string parent_label;
    bool touches_truncation = false;

    std::size_t vertex_count() const { return positions.size(); }
    std::size_t face_count() const { return triangles.size(); }
    bool empty() const { return triangles.empty(); }
};

enum class CoveragePolicy { Error, Allow };

/// Marching-triangles cut along r = ρ and r = R. A vertex with r exactly at
/// a level counts as lying above it. Cut points are shared between the two
/// faces of an edge, so the region is conforming.
ClippedRegion clip(const TriMesh& mesh, double rho, double R, CoveragePolicy policy = CoveragePolicy::Error);

double region_area(const ClippedRegion& region);
/// Area of the fragments whose parent face is selected by the mask.
double region_area(const ClippedRegion& region, std::span<const char> parent_face_mask);

/// ∫ |∇^P r|² over the region, with the per-face value of the parent face.
double gradient_energy(const ClippedRegion& region, const TriMesh& parent);

struct LevelSegment {
    Vec3 a, b;
    int face = -1;
};

/// Polyline pieces of {r = R}, one per crossing face.
std::vector<LevelSegment> level_set(const TriMesh& mesh, double R);

/// J_r(R) = Σ |segment| · |∇^P r|(face). `face_mask`, when given, restricts
/// the sum to faces with a nonzero entry. Throws CoverageError if a truncation
/// vertex has r < R.
double flux(const TriMesh& mesh, double R, std::span<const char> face_mask = {});

/// Dirichlet values per boundary class; unset classes are left free
/// (natural zero Neumann condition).
struct BoundarySpec {
    std::optional<double> inner;
    std::optional<double> outer;
    std::optional<double> truncation;
};

/// Exact: plain linear-element stiffness (cotangent weights as they come).
/// Clamped: negative edge weights set to 0, which gives an M-matrix and a
/// strict discrete maximum principle but an O(h) energy bias on cut
/// fragments, where obtuse angles are common.
enum class WeightPolicy { Exact, Clamped };

struct SparseSPDSystem {
    CsrMatrix stiffness;  // full, symmetric, positive semidefinite
    std::vector<double> mass;
    std::vector<char> constrained;
    std::vector<double> boundary_value;
    std::size_t skipped_faces = 0;
    std::size_t negative_edges = 0;  // edges whose summed weight was negative

    std::size_t size() const { return mass.size(); }
    std::size_t constrained_count() const;
};

SparseSPDSystem assemble_laplacian(const ClippedRegion& region, const BoundarySpec& spec,
                                   WeightPolicy weights = WeightPolicy::Exact);

struct FieldSolution {
    std::vector<double> field;
    int iterations = 0;
    double relative_residual = 0.0;
    /// Dirichlet solves only: how far the field leaves the range of its
    /// boundary values (0 when the maximum principle holds).
    double max_principle_excess = 0.0;
};

/// Harmonic extension of the boundary values.
FieldSolution solve_dirichlet(const SparseSPDSystem& sys, const SolverConfig& cfg = {});

/// K u = M f on free vertices, u = boundary values on constrained ones.
FieldSolution solve_poisson(const SparseSPDSystem& sys, std::span<const double> f, const SolverConfig& cfg = {});

enum class TruncationPolicy { Reflect, Error };

struct CapacityResult {
    double capacity = 0.0;
    double resistance = 0.0;  // 1 / capacity
    std::vector<double> potential;
    double max_principle_excess = 0.0;
    std::size_t negative_edges = 0;
    int iterations = 0;
    double relative_residual = 0.0;
};

CapacityResult capacity_discrete(const ClippedRegion& annulus, TruncationPolicy policy = TruncationPolicy::Error,
                                 const SolverConfig& cfg = {});

FieldSolution exit_time_discrete(const ClippedRegion& ball, const SolverConfig& cfg = {});

struct EigenEstimate {
    double lambda = 0.0;
    int iterations = 0;
    double gap = 0.0;  // relative change of the last step
    std::vector<double> mode;
};

EigenEstimate first_eigenvalue_estimate(const ClippedRegion& ball, double rel_tol = 1e-8, int max_iterations = 500);

struct EndsCount {
    int count = 0;
    /// Mesh vertex lists of the components of {r ≥ R} that reach the
    /// truncation boundary, ordered by smallest vertex index.
    std::vector<std::vector<int>> ends;
    int bounded_components = 0;
    std::vector<std::string> warnings;
};

EndsCount count_ends(const TriMesh& mesh, double R);

/// Face mask selecting faces with a vertex in the given vertex set.
std::vector<char> face_mask_from_vertices(const TriMesh& mesh, std::span<const int> vertices);

/// Median edge length of the mesh.
double typical_edge_length(const TriMesh& mesh);

}  // namespace warpgeom
