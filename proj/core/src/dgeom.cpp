#include "warpgeom/dgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "warpgeom/error.hpp"

namespace warpgeom {

namespace {

void check_levels(double rho, double R) {
    if (!std::isfinite(rho) || !std::isfinite(R)) throw PreconditionError("clip: radii must be finite");
    if (rho < 0.0) throw PreconditionError("clip: rho must be nonnegative");
    if (!(R > 0.0)) throw PreconditionError("clip: R must be positive");
    if (!(rho < R)) throw PreconditionError("clip: need rho < R");
}

double face_gradient(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& pole) {
    const Vec3 n = cross(b - a, c - a);
    const double nn = norm(n);
    const double scale = std::max({dot(b - a, b - a), dot(c - b, c - b), dot(a - c, a - c)});
    if (!(nn > 1e-14 * scale) || scale == 0.0) throw MeshError("degenerate face");
    const Vec3 d = (a + b + c) / 3.0 - pole;
    const double dn = norm(d);
    if (dn == 0.0) throw PreconditionError("radial_gradient_norm: pole lies on the face centroid");
    const double cosine = dot(d, n) / (dn * nn);
    return std::clamp(std::sqrt(std::max(0.0, 1.0 - cosine * cosine)), 0.0, 1.0);
}

double quality(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double l2 = dot(b - a, b - a) + dot(c - b, c - b) + dot(a - c, a - c);
    return l2 > 0.0 ? 4.0 * std::sqrt(3.0) * triangle_area(a, b, c) / l2 : 0.0;
}

// Edges of the mesh boundary, restricted to faces with at least two
// truncation vertices (the only candidates).
std::unordered_set<std::uint64_t> truncation_edges(const TriMesh& m) {
    std::unordered_map<std::uint64_t, int> count;
    for (const Tri& t : m.triangles) {
        int tagged = 0;
        for (int v : t) tagged += m.tags[v] == VertexTag::OuterTruncation;
        if (tagged < 2) continue;
        for (int k = 0; k < 3; ++k) count[edge_key(t[k], t[(k + 1) % 3])] += 1;
    }
    std::unordered_set<std::uint64_t> out;
    for (const auto& [key, n] : count) {
        auto [a, b] = edge_vertices(key);
        if (n == 1 && m.tags[a] == VertexTag::OuterTruncation && m.tags[b] == VertexTag::OuterTruncation)
            out.insert(key);
    }
    return out;
}

// Level crossing on the undirected edge (a, b), computed from the lower index
// so both incident faces produce the bit-identical point.
Vec3 crossing(const std::vector<Vec3>& pos, const std::vector<double>& r, int a, int b, double level) {
    if (a > b) std::swap(a, b);
    const double t = (level - r[a]) / (r[b] - r[a]);
    return lerp(pos[a], pos[b], t);
}

class RegionBuilder {
public:
    RegionBuilder(const TriMesh& m, double rho, double R)
        : m_(m), rho_(rho), R_(R), orig_(m.vertex_count(), -1), trunc_(truncation_edges(m)) {}

    struct Point {
        int orig = -1;  // mesh vertex, or -1 for a cut point
        int ea = -1, eb = -1;
        double r = 0.0;
        int id = -1;
    };

    // Region ids of original vertices are assigned on emit, so vertices
    // clipped away never enter the region.
    Point original(int v) const { return {v, -1, -1, m_.r[v], -1}; }

    Point cut(int a, int b, bool outer) {
        const double level = outer ? R_ : rho_;
        const std::uint64_t key = edge_key(a, b);
        auto& table = outer ? outer_cuts_ : inner_cuts_;
        auto it = table.find(key);
        int id;
        if (it != table.end()) {
            id = it->second;
        } else {
            id = add(crossing(m_.positions, m_.r, a, b, level), level,
                     outer ? RegionVertexKind::OuterLevel : RegionVertexKind::InnerLevel, trunc_.count(key) > 0);
            table.emplace(key, id);
        }
        return {-1, std::min(a, b), std::max(a, b), level, id};
    }

    // Sutherland–Hodgman against one level; the inner pass keeps r ≥ ρ, the
    // outer pass keeps r < R.
    std::vector<Point> clip_polygon(const std::vector<Point>& poly, bool outer) {
        const double level = outer ? R_ : rho_;
        auto inside = [&](const Point& p) { return outer ? p.r < level : p.r >= level; };
        std::vector<Point> out;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point& p = poly[i];
            const Point& q = poly[(i + 1) % poly.size()];
            const bool pin = inside(p), qin = inside(q);
            if (pin) out.push_back(p);
            if (pin != qin) {
                int a, b;
                if (p.orig >= 0 && q.orig >= 0) {
                    a = p.orig;
                    b = q.orig;
                } else if (p.orig < 0) {
                    a = p.ea;
                    b = p.eb;
                } else {
                    a = q.ea;
                    b = q.eb;
                }
                out.push_back(cut(a, b, outer));
            }
        }
        return out;
    }

    void emit(std::vector<Point>& poly, int face) {
        const std::size_t k = poly.size();
        if (k < 3) return;
        for (Point& p : poly) {
            if (p.orig < 0) continue;
            if (orig_[p.orig] < 0) {
                // a mesh vertex exactly on r = ρ is part of the inner boundary
                const auto kind = rho_ > 0.0 && m_.r[p.orig] == rho_ ? RegionVertexKind::InnerLevel
                                                                     : RegionVertexKind::Original;
                orig_[p.orig] = add(m_.positions[p.orig], m_.r[p.orig], kind,
                                    m_.tags[p.orig] == VertexTag::OuterTruncation);
            }
            p.id = orig_[p.orig];
        }
        std::size_t pivot = 0;
        if (k > 3) {
            double best = -1.0;
            for (std::size_t p = 0; p < k; ++p) {
                double worst = std::numeric_limits<double>::infinity();
                for (std::size_t i = 1; i + 1 < k; ++i)
                    worst = std::min(worst, quality(pos(poly[p]), pos(poly[(p + i) % k]), pos(poly[(p + i + 1) % k])));
                if (worst > best) {
                    best = worst;
                    pivot = p;
                }
            }
        }
        for (std::size_t i = 1; i + 1 < k; ++i) {
            const Tri t{poly[pivot].id, poly[(pivot + i) % k].id, poly[(pivot + i + 1) % k].id};
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
            reg_.triangles.push_back(t);
            reg_.parent_face.push_back(face);
        }
    }

    ClippedRegion finish() { return std::move(reg_); }

private:
    int add(Vec3 p, double r, RegionVertexKind kind, bool trunc) {
        reg_.positions.push_back(p);
        reg_.r.push_back(r);
        reg_.kind.push_back(kind);
        reg_.on_truncation.push_back(trunc ? 1 : 0);
        return static_cast<int>(reg_.positions.size()) - 1;
    }
    const Vec3& pos(const Point& p) const { return reg_.positions[p.id]; }

    const TriMesh& m_;
    double rho_, R_;
    std::vector<int> orig_;
    std::unordered_set<std::uint64_t> trunc_;
    std::unordered_map<std::uint64_t, int> inner_cuts_, outer_cuts_;
    ClippedRegion reg_;
};

LoopLabel label_for(RegionVertexKind a, RegionVertexKind b) {
    if (a == RegionVertexKind::InnerLevel && b == RegionVertexKind::InnerLevel) return LoopLabel::Inner;
    if (a == RegionVertexKind::OuterLevel && b == RegionVertexKind::OuterLevel) return LoopLabel::Outer;
    return LoopLabel::Truncation;
}

void build_loops(ClippedRegion& reg) {
    auto directed = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
    };
    std::unordered_set<std::uint64_t> half;
    half.reserve(reg.triangles.size() * 3);
    for (const Tri& t : reg.triangles)
        for (int k = 0; k < 3; ++k) half.insert(directed(t[k], t[(k + 1) % 3]));

    struct Edge {
        int a, b;
        LoopLabel label;
        bool used = false;
    };
    std::vector<Edge> edges;
    for (const Tri& t : reg.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (!half.count(directed(b, a))) edges.push_back({a, b, label_for(reg.kind[a], reg.kind[b])});
        }
    std::unordered_map<int, std::vector<int>> from;
    for (std::size_t i = 0; i < edges.size(); ++i) from[edges[i].a].push_back(static_cast<int>(i));

    for (std::size_t s = 0; s < edges.size(); ++s) {
        if (edges[s].used) continue;
        BoundaryLoop loop;
        loop.label = edges[s].label;
        const int start = edges[s].a;
        int cur = static_cast<int>(s);
        loop.vertices.push_back(start);
        while (true) {
            edges[cur].used = true;
            const int v = edges[cur].b;
            if (v == start) {
                loop.closed = true;
                break;
            }
            loop.vertices.push_back(v);
            int next = -1;
            if (auto it = from.find(v); it != from.end())
                for (int e : it->second)
                    if (!edges[e].used && edges[e].label == loop.label) {
                        next = e;
                        break;
                    }
            if (next < 0) break;
            cur = next;
        }
        reg.loops.push_back(std::move(loop));
    }
}

struct Reduced {
    std::vector<int> free_index;  // region vertex -> free unknown, or -1
    std::vector<int> free_vertices;
    CsrMatrix A;
    std::vector<double> rhs_boundary;  // −K_fc g_c
};

Reduced reduce(const SparseSPDSystem& sys) {
    Reduced red;
    const int n = static_cast<int>(sys.size());
    red.free_index.assign(n, -1);
    for (int i = 0; i < n; ++i)
        if (!sys.constrained[i]) {
            red.free_index[i] = static_cast<int>(red.free_vertices.size());
            red.free_vertices.push_back(i);
        }
    const int nf = static_cast<int>(red.free_vertices.size());
    red.A.rows = nf;
    red.A.row_ptr.assign(static_cast<std::size_t>(nf) + 1, 0);
    red.rhs_boundary.assign(nf, 0.0);
    const CsrMatrix& K = sys.stiffness;
    for (int fi = 0; fi < nf; ++fi) {
        const int i = red.free_vertices[fi];
        // free columns keep sorted order because free_index is monotone
        for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
            const int j = K.cols[k];
            if (red.free_index[j] >= 0) {
                red.A.cols.push_back(red.free_index[j]);
                red.A.values.push_back(K.values[k]);
            } else {
                red.rhs_boundary[fi] -= K.values[k] * sys.boundary_value[j];
            }
        }
        red.A.row_ptr[fi + 1] = static_cast<int>(red.A.cols.size());
    }
    return red;
}

FieldSolution scatter(const SparseSPDSystem& sys, const Reduced& red, CgResult&& cg) {
    FieldSolution out;
    out.field = sys.boundary_value;
    for (std::size_t fi = 0; fi < red.free_vertices.size(); ++fi) out.field[red.free_vertices[fi]] = cg.x[fi];
    out.iterations = cg.iterations;
    out.relative_residual = cg.relative_residual;
    return out;
}

double median_edge(const std::vector<Vec3>& pos, const std::vector<Tri>& tris) {
    std::vector<double> len;
    len.reserve(tris.size() * 3);
    for (const Tri& t : tris)
        for (int k = 0; k < 3; ++k) len.push_back(norm(pos[t[k]] - pos[t[(k + 1) % 3]]));
    if (len.empty()) return 0.0;
    auto mid = len.begin() + static_cast<std::ptrdiff_t>(len.size() / 2);
    std::nth_element(len.begin(), mid, len.end());
    return *mid;
}

}  // namespace

std::string to_string(LoopLabel label) {
    switch (label) {
        case LoopLabel::Inner: return "inner";
        case LoopLabel::Outer: return "outer";
        case LoopLabel::Truncation: return "truncation";
    }
    return "?";
}

double radial_gradient_norm(const TriMesh& mesh, int face) {
    if (face < 0 || static_cast<std::size_t>(face) >= mesh.face_count())
        throw PreconditionError("radial_gradient_norm: face index out of range");
    const Tri& t = mesh.triangles[face];
    return face_gradient(mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]], mesh.pole);
}

ClippedRegion clip(const TriMesh& mesh, double rho, double R, CoveragePolicy policy) {
    check_levels(rho, R);
    RegionBuilder builder(mesh, rho, R);
    using Point = RegionBuilder::Point;
    std::vector<Point> poly;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const Tri& t = mesh.triangles[f];
        int below_R = 0, above_rho = 0;
        for (int v : t) {
            below_R += mesh.r[v] < R;
            above_rho += mesh.r[v] >= rho;
        }
        if (below_R == 0 || above_rho == 0) continue;
        poly.clear();
        for (int v : t) poly.push_back(builder.original(v));
        if (above_rho < 3) poly = builder.clip_polygon(poly, false);
        if (below_R < 3) poly = builder.clip_polygon(poly, true);
        builder.emit(poly, static_cast<int>(f));
    }
    ClippedRegion reg = builder.finish();
    reg.rho = rho;
    reg.R = R;
    reg.parent_id = mesh.fingerprint();
    reg.parent_label = mesh.label;
    reg.touches_truncation = std::any_of(reg.on_truncation.begin(), reg.on_truncation.end(), [](char c) { return c; });
    if (policy == CoveragePolicy::Error && reg.touches_truncation)
        throw CoverageError("extrinsic region at R=" + std::to_string(R) +
                                " reaches the truncation boundary of the mesh (min truncation radius " +
                                std::to_string(mesh.min_truncation_radius()) + ")",
                            R);
    build_loops(reg);
    return reg;
}

double region_area(const ClippedRegion& region) {
    if (region.empty()) throw PreconditionError("region_area: empty region");
    double a = 0.0;
    for (const Tri& t : region.triangles)
        a += triangle_area(region.positions[t[0]], region.positions[t[1]], region.positions[t[2]]);
    return a;
}

double region_area(const ClippedRegion& region, std::span<const char> parent_face_mask) {
    double a = 0.0;
    for (std::size_t k = 0; k < region.triangles.size(); ++k) {
        if (!parent_face_mask[region.parent_face[k]]) continue;
        const Tri& t = region.triangles[k];
        a += triangle_area(region.positions[t[0]], region.positions[t[1]], region.positions[t[2]]);
    }
    return a;
}

double gradient_energy(const ClippedRegion& region, const TriMesh& parent) {
    double e = 0.0;
    for (std::size_t k = 0; k < region.triangles.size(); ++k) {
        const Tri& t = region.triangles[k];
        const double g = radial_gradient_norm(parent, region.parent_face[k]);
        e += g * g * triangle_area(region.positions[t[0]], region.positions[t[1]], region.positions[t[2]]);
    }
    return e;
}

std::vector<LevelSegment> level_set(const TriMesh& mesh, double R) {
    std::vector<LevelSegment> out;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const Tri& t = mesh.triangles[f];
        int above = 0;
        for (int v : t) above += mesh.r[v] >= R;
        if (above == 0 || above == 3) continue;
        Vec3 pts[2];
        int n = 0;
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if ((mesh.r[a] >= R) != (mesh.r[b] >= R)) pts[n++] = crossing(mesh.positions, mesh.r, a, b, R);
        }
        out.push_back({pts[0], pts[1], static_cast<int>(f)});
    }
    return out;
}

double flux(const TriMesh& mesh, double R, std::span<const char> face_mask) {
    if (!(R > 0.0) || !std::isfinite(R)) throw PreconditionError("flux: R must be positive");
    const double reach = mesh.min_truncation_radius();
    if (reach < R)
        throw CoverageError("level r=" + std::to_string(R) + " leaves the computational window (min truncation radius " +
                                std::to_string(reach) + ")",
                            R);
    double j = 0.0;
    for (const LevelSegment& s : level_set(mesh, R)) {
        if (!face_mask.empty() && !face_mask[s.face]) continue;
        j += norm(s.b - s.a) * radial_gradient_norm(mesh, s.face);
    }
    return j;
}

std::size_t SparseSPDSystem::constrained_count() const {
    return static_cast<std::size_t>(std::count(constrained.begin(), constrained.end(), 1));
}

SparseSPDSystem assemble_laplacian(const ClippedRegion& region, const BoundarySpec& spec, WeightPolicy weights) {
    const std::size_t n = region.vertex_count();
    SparseSPDSystem sys;
    sys.mass.assign(n, 0.0);
    sys.constrained.assign(n, 0);
    sys.boundary_value.assign(n, 0.0);

    std::vector<std::pair<std::uint64_t, double>> w;
    w.reserve(region.triangles.size() * 3);
    for (const Tri& t : region.triangles) {
        const Vec3 &a = region.positions[t[0]], &b = region.positions[t[1]], &c = region.positions[t[2]];
        const double area = triangle_area(a, b, c);
        const double scale = std::max({dot(b - a, b - a), dot(c - b, c - b), dot(a - c, a - c)});
        if (!(2.0 * area > 1e-12 * scale)) {
            ++sys.skipped_faces;
            continue;
        }
        const auto cot = triangle_cotangents(a, b, c);
        for (int k = 0; k < 3; ++k) {
            // the angle at vertex k faces edge (k+1, k+2)
            w.emplace_back(edge_key(t[(k + 1) % 3], t[(k + 2) % 3]), 0.5 * cot[k]);
            sys.mass[t[k]] += area / 3.0;
        }
    }
    std::sort(w.begin(), w.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    CsrBuilder builder(static_cast<int>(n));
    std::vector<double> diag(n, 0.0);
    for (std::size_t k = 0; k < w.size();) {
        std::size_t e = k;
        double sum = 0.0;
        while (e < w.size() && w[e].first == w[k].first) sum += w[e++].second;
        if (sum < 0.0) ++sys.negative_edges;
        const double weight = weights == WeightPolicy::Clamped ? std::max(sum, 0.0) : sum;
        if (weight != 0.0) {
            auto [i, j] = edge_vertices(w[k].first);
            builder.add(i, j, -weight);
            builder.add(j, i, -weight);
            diag[i] += weight;
            diag[j] += weight;
        }
        k = e;
    }
    for (std::size_t i = 0; i < n; ++i) builder.add(static_cast<int>(i), static_cast<int>(i), diag[i]);
    sys.stiffness = builder.build();

    for (std::size_t i = 0; i < n; ++i) {
        std::optional<double> value;
        switch (region.kind[i]) {
            case RegionVertexKind::InnerLevel: value = spec.inner; break;
            case RegionVertexKind::OuterLevel: value = spec.outer; break;
            case RegionVertexKind::Original: break;
        }
        if (!value && region.on_truncation[i]) value = spec.truncation;
        if (value) {
            sys.constrained[i] = 1;
            sys.boundary_value[i] = *value;
        }
    }
    if (sys.constrained_count() == 0) throw PreconditionError("assemble_laplacian: system has no Dirichlet vertices");

    // Vertices only touched by skipped slivers sit on a level line in
    // practice; pin them to the nearest constrained level.
    for (std::size_t i = 0; i < n; ++i) {
        if (sys.constrained[i] || diag[i] > 0.0) continue;
        std::optional<double> value;
        const bool nearer_inner = std::abs(region.r[i] - region.rho) < std::abs(region.r[i] - region.R);
        if (nearer_inner && spec.inner) value = spec.inner;
        if (!value) value = spec.outer ? spec.outer : spec.inner ? spec.inner : spec.truncation;
        sys.constrained[i] = 1;
        sys.boundary_value[i] = *value;
    }
    return sys;
}

FieldSolution solve_dirichlet(const SparseSPDSystem& sys, const SolverConfig& cfg) {
    FieldSolution out = solve_poisson(sys, {}, cfg);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < sys.size(); ++i)
        if (sys.constrained[i]) {
            lo = std::min(lo, sys.boundary_value[i]);
            hi = std::max(hi, sys.boundary_value[i]);
        }
    for (std::size_t i = 0; i < sys.size(); ++i)
        out.max_principle_excess = std::max({out.max_principle_excess, out.field[i] - hi, lo - out.field[i]});
    return out;
}

FieldSolution solve_poisson(const SparseSPDSystem& sys, std::span<const double> f, const SolverConfig& cfg) {
    if (sys.constrained_count() == 0) throw PreconditionError("solve: system has no Dirichlet vertices");
    if (!f.empty() && f.size() != sys.size()) throw PreconditionError("solve_poisson: source size mismatch");
    Reduced red = reduce(sys);
    std::vector<double> rhs = red.rhs_boundary;
    if (!f.empty())
        for (std::size_t fi = 0; fi < red.free_vertices.size(); ++fi) {
            const int i = red.free_vertices[fi];
            rhs[fi] += sys.mass[i] * f[i];
        }
    if (red.free_vertices.empty()) {
        FieldSolution out;
        out.field = sys.boundary_value;
        return out;
    }
    return scatter(sys, red, conjugate_gradient(red.A, rhs, {}, cfg));
}

CapacityResult capacity_discrete(const ClippedRegion& annulus, TruncationPolicy policy, const SolverConfig& cfg) {
    if (annulus.empty()) throw PreconditionError("capacity_discrete: empty region");
    if (!(annulus.rho > 0.0)) throw PreconditionError("capacity_discrete: region must be an annulus (rho > 0)");
    if (policy == TruncationPolicy::Error && annulus.touches_truncation)
        throw CoverageError("capacity_discrete: annulus reaches the truncation boundary", annulus.R);
    const double h = median_edge(annulus.positions, annulus.triangles);
    if (!(annulus.rho < annulus.R - 2.0 * h))
        throw PreconditionError("capacity_discrete: annulus too thin for the mesh (need rho < R - 2h, h=" +
                                std::to_string(h) + ")");
    BoundarySpec spec;
    spec.inner = 0.0;
    spec.outer = 1.0;
    const SparseSPDSystem sys = assemble_laplacian(annulus, spec);
    FieldSolution sol = solve_dirichlet(sys, cfg);
    std::vector<double> kpsi(sys.size());
    sys.stiffness.multiply(sol.field, kpsi);
    CapacityResult out;
    out.capacity = std::inner_product(sol.field.begin(), sol.field.end(), kpsi.begin(), 0.0);
    out.resistance = 1.0 / out.capacity;
    out.potential = std::move(sol.field);
    out.max_principle_excess = sol.max_principle_excess;
    out.negative_edges = sys.negative_edges;
    out.iterations = sol.iterations;
    out.relative_residual = sol.relative_residual;
    return out;
}

FieldSolution exit_time_discrete(const ClippedRegion& ball, const SolverConfig& cfg) {
    if (ball.empty()) throw PreconditionError("exit_time_discrete: empty region");
    if (ball.rho != 0.0) throw PreconditionError("exit_time_discrete: region must be an extrinsic ball (rho = 0)");
    if (ball.touches_truncation)
        throw CoverageError("exit_time_discrete: ball reaches the truncation boundary", ball.R);
    BoundarySpec spec;
    spec.outer = 0.0;
    const SparseSPDSystem sys = assemble_laplacian(ball, spec);
    const std::vector<double> one(sys.size(), 1.0);
    return solve_poisson(sys, one, cfg);
}

EigenEstimate first_eigenvalue_estimate(const ClippedRegion& ball, double rel_tol, int max_iterations) {
    if (ball.empty()) throw PreconditionError("first_eigenvalue_estimate: empty region");
    BoundarySpec spec;
    spec.outer = 0.0;
    if (ball.rho > 0.0) spec.inner = 0.0;
    const SparseSPDSystem sys = assemble_laplacian(ball, spec);
    const Reduced red = reduce(sys);
    const std::size_t nf = red.free_vertices.size();
    if (nf == 0) throw PreconditionError("first_eigenvalue_estimate: region has no interior vertices");

    std::vector<double> m(nf);
    for (std::size_t k = 0; k < nf; ++k) m[k] = sys.mass[red.free_vertices[k]];
    auto m_norm = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t k = 0; k < nf; ++k) s += m[k] * x[k] * x[k];
        return std::sqrt(s);
    };
    std::vector<double> x(nf, 1.0), b(nf), kx(nf), guess;
    {
        const double s = m_norm(x);
        for (double& v : x) v /= s;
    }
    SolverConfig cfg;
    cfg.rel_tol = 1e-11;
    EigenEstimate out;
    double lambda_prev = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t k = 0; k < nf; ++k) b[k] = m[k] * x[k];
        if (lambda_prev > 0.0) {
            guess = x;
            for (double& v : guess) v /= lambda_prev;
        }
        CgResult cg = conjugate_gradient(red.A, b, guess, cfg);
        x = std::move(cg.x);
        const double s = m_norm(x);
        for (double& v : x) v /= s;
        red.A.multiply(x, kx);
        const double lambda = std::inner_product(x.begin(), x.end(), kx.begin(), 0.0);
        out.iterations = it;
        out.gap = lambda_prev > 0.0 ? std::abs(lambda - lambda_prev) / lambda : 1.0;
        out.lambda = lambda;
        if (lambda_prev > 0.0 && out.gap <= rel_tol) {
            out.mode.assign(sys.size(), 0.0);
            for (std::size_t k = 0; k < nf; ++k) out.mode[red.free_vertices[k]] = x[k];
            return out;
        }
        lambda_prev = lambda;
    }
    throw ConvergenceError("first_eigenvalue_estimate: inverse iteration did not settle", out.gap);
}

EndsCount count_ends(const TriMesh& mesh, double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw PreconditionError("count_ends: R must be positive");
    const int n = static_cast<int>(mesh.vertex_count());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const Tri& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (mesh.r[a] >= R && mesh.r[b] >= R) {
                const int ra = find(a), rb = find(b);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    std::vector<int> slot(n, -1);
    std::vector<std::vector<int>> comps;
    std::vector<char> reaches;
    for (int v = 0; v < n; ++v) {
        if (mesh.r[v] < R) continue;
        const int root = find(v);
        if (slot[root] < 0) {
            slot[root] = static_cast<int>(comps.size());
            comps.emplace_back();
            reaches.push_back(0);
        }
        comps[slot[root]].push_back(v);
        if (mesh.tags[v] == VertexTag::OuterTruncation) reaches[slot[root]] = 1;
    }
    EndsCount out;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (reaches[c])
            out.ends.push_back(std::move(comps[c]));
        else
            ++out.bounded_components;
    }
    out.count = static_cast<int>(out.ends.size());
    if (mesh.max_radius() < 2.0 * R)
        out.warnings.push_back("mesh reaches only r=" + std::to_string(mesh.max_radius()) +
                               " < 2R; ends count may be unreliable");
    return out;
}

std::vector<char> face_mask_from_vertices(const TriMesh& mesh, std::span<const int> vertices) {
    std::vector<char> in(mesh.vertex_count(), 0);
    for (int v : vertices) in[v] = 1;
    std::vector<char> mask(mesh.face_count(), 0);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const Tri& t = mesh.triangles[f];
        mask[f] = in[t[0]] || in[t[1]] || in[t[2]];
    }
    return mask;
}

double typical_edge_length(const TriMesh& mesh) { return median_edge(mesh.positions, mesh.triangles); }

}  // namespace warpgeom
