#include "warpgeom/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "warpgeom/error.hpp"

namespace warpgeom {

namespace {

double param_or(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void require_known(const std::map<std::string, double>& p, std::initializer_list<const char*> keys,
                   std::string_view surface) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (const char* key : keys) ok = ok || k == key;
        if (!ok) throw PreconditionError("unknown parameter '" + k + "' for surface " + std::string(surface));
        if (!std::isfinite(v)) throw PreconditionError("parameter '" + k + "' must be finite");
    }
}

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
}

}  // namespace

// ------------------------------------------------------------------ TriMesh

void TriMesh::recompute_radii() {
    r.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) r[i] = norm(positions[i] - pole);
}

double TriMesh::max_radius() const {
    double m = 0.0;
    for (double x : r) m = std::max(m, x);
    return m;
}

double TriMesh::min_truncation_radius() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i)
        if (tags[i] == VertexTag::OuterTruncation) m = std::min(m, r[i]);
    return m;
}

double TriMesh::total_area() const {
    double a = 0.0;
    for (const Tri& t : triangles) a += triangle_area(positions[t[0]], positions[t[1]], positions[t[2]]);
    return a;
}

std::uint64_t TriMesh::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const Vec3& p : positions) fnv(h, &p, sizeof p);
    for (const Tri& t : triangles) fnv(h, t.data(), sizeof(int) * 3);
    fnv(h, &pole, sizeof pole);
    return h;
}

void TriMesh::validate() const {
    const int n = static_cast<int>(positions.size());
    if (r.size() != positions.size() || tags.size() != positions.size())
        throw MeshError("per-vertex arrays have inconsistent sizes");
    std::unordered_map<std::uint64_t, std::pair<int, int>> directed;  // key -> (count, sign sum)
    directed.reserve(triangles.size() * 3);
    for (std::size_t f = 0; f < triangles.size(); ++f) {
        const Tri& t = triangles[f];
        for (int v : t)
            if (v < 0 || v >= n) throw MeshError("triangle " + std::to_string(f) + " references invalid vertex");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw MeshError("triangle " + std::to_string(f) + " repeats a vertex");
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            auto& slot = directed[edge_key(a, b)];
            slot.first += 1;
            slot.second += a < b ? 1 : -1;
        }
    }
    std::vector<std::pair<int, int>> bad;
    bool misoriented = false;
    for (const auto& [key, slot] : directed) {
        if (slot.first > 2) bad.push_back(edge_vertices(key));
        if (slot.first == 2 && slot.second != 0) misoriented = true;
    }
    if (!bad.empty()) {
        std::sort(bad.begin(), bad.end());
        std::ostringstream os;
        os << bad.size() << " non-manifold edge(s), e.g. (" << bad.front().first << ", " << bad.front().second << ")";
        throw NonManifoldError(os.str(), std::move(bad));
    }
    if (misoriented) throw MeshError("triangle orientation is inconsistent across a shared edge");
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (r[i] != norm(positions[i] - pole) || !(r[i] >= 0.0))
            throw MeshError("stored extrinsic distance of vertex " + std::to_string(i) + " is stale");
}

TriMesh make_mesh(std::vector<Vec3> positions, std::vector<Tri> triangles, Vec3 pole, std::string label) {
    TriMesh mesh;
    mesh.positions = std::move(positions);
    mesh.triangles = std::move(triangles);
    mesh.pole = pole;
    mesh.label = std::move(label);
    mesh.recompute_radii();
    mesh.tags.assign(mesh.positions.size(), VertexTag::Interior);
    std::unordered_map<std::uint64_t, int> count;
    for (const Tri& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            if (a >= 0 && b >= 0 && a < static_cast<int>(mesh.positions.size()) &&
                b < static_cast<int>(mesh.positions.size()))
                ++count[edge_key(a, b)];
        }
    mesh.validate();
    for (const auto& [key, c] : count) {
        if (c != 1) continue;
        auto [a, b] = edge_vertices(key);
        mesh.tags[a] = VertexTag::OuterTruncation;
        mesh.tags[b] = VertexTag::OuterTruncation;
    }
    return mesh;
}

std::vector<double> barycentric_areas(const TriMesh& mesh) {
    std::vector<double> area(mesh.vertex_count(), 0.0);
    for (const Tri& t : mesh.triangles) {
        const double a = triangle_area(mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]]) / 3.0;
        for (int v : t) area[v] += a;
    }
    return area;
}

// ------------------------------------------------------------- ParamSurface

void ParamSurface::validate_immersion(int samples) const {
    const double du = (u1 - u0) * 1e-6, dv = (v1 - v0) * 1e-6;
    for (int i = 1; i < samples; ++i)
        for (int j = 1; j < samples; ++j) {
            const double u = u0 + (u1 - u0) * i / samples;
            const double v = v0 + (v1 - v0) * j / samples;
            const Vec3 xu = (map(u + du, v) - map(u - du, v)) / (2 * du);
            const Vec3 xv = (map(u, v + dv) - map(u, v - dv)) / (2 * dv);
            const double n = norm(cross(xu, xv));
            const double scale = norm(xu) * norm(xv);
            if (!(n > 1e-9 * std::max(scale, 1e-300)))
                throw PreconditionError(name + " is not an immersion near (u, v) = (" + std::to_string(u) + ", " +
                                        std::to_string(v) + ")");
        }
}

ParamSurface builtin_surface(std::string_view name, const std::map<std::string, double>& params) {
    constexpr double pi = std::numbers::pi;
    ParamSurface s;
    s.name = std::string(name);
    s.params = params;
    if (name == "plane") {
        require_known(params, {"extent"}, name);
        const double L = param_or(params, "extent", 4.0);
        if (!(L > 0.0)) throw PreconditionError("plane extent must be positive");
        s.map = [](double u, double v) { return Vec3{u, v, 0.0}; };
        s.u0 = s.v0 = -L;
        s.u1 = s.v1 = L;
        s.params["extent"] = L;
    } else if (name == "catenoid") {
        require_known(params, {"a", "vmax"}, name);
        const double a = param_or(params, "a", 1.0);
        const double vmax = param_or(params, "vmax", 4.0);
        if (!(a > 0.0)) throw PreconditionError("catenoid neck radius a must be positive");
        if (!(vmax > 0.0)) throw PreconditionError("catenoid vmax must be positive");
        s.map = [a](double u, double v) {
            return Vec3{a * std::cosh(v) * std::cos(u), a * std::cosh(v) * std::sin(u), a * v};
        };
        s.u0 = 0.0;
        s.u1 = 2.0 * pi;
        s.periodic_u = true;
        s.v0 = -vmax;
        s.v1 = vmax;
        s.params["a"] = a;
        s.params["vmax"] = vmax;
    } else if (name == "helicoid") {
        require_known(params, {"c", "umax", "vmax"}, name);
        const double c = param_or(params, "c", 1.0);
        const double umax = param_or(params, "umax", 2.0 * pi);
        const double vmax = param_or(params, "vmax", 4.0);
        if (!(c != 0.0) || !(umax > 0.0) || !(vmax > 0.0))
            throw PreconditionError("helicoid needs c != 0 and positive umax, vmax");
        s.map = [c](double u, double v) { return Vec3{v * std::cos(u), v * std::sin(u), c * u}; };
        s.u0 = -umax;
        s.u1 = umax;
        s.v0 = -vmax;
        s.v1 = vmax;
        s.params["c"] = c;
        s.params["umax"] = umax;
        s.params["vmax"] = vmax;
    } else if (name == "enneper") {
        require_known(params, {"extent"}, name);
        const double L = param_or(params, "extent", 4.0);
        if (!(L > 0.0)) throw PreconditionError("enneper extent must be positive");
        s.map = [](double u, double v) {
            return Vec3{u - u * u * u / 3.0 + u * v * v, -v + v * v * v / 3.0 - v * u * u, u * u - v * v};
        };
        s.u0 = s.v0 = -L;
        s.u1 = s.v1 = L;
        s.params["extent"] = L;
    } else {
        throw PreconditionError("unknown surface '" + std::string(name) +
                                "' (expected plane, catenoid, helicoid or enneper)");
    }
    return s;
}

// --------------------------------------------------------------- tessellate

TriMesh tessellate(const ParamSurface& s, int nu, int nv, std::span<const double> refine_near, Vec3 pole) {
    if (nu < 8 || nv < 8) throw PreconditionError("tessellate needs nu, nv >= 8");
    s.validate_immersion();

    const int cols = s.periodic_u ? nu : nu + 1;
    const int rows = s.periodic_v ? nv : nv + 1;
    const double du = (s.u1 - s.u0) / nu;
    const double dv = (s.v1 - s.v0) / nv;

    std::vector<std::pair<double, double>> uv;
    std::vector<Vec3> pos;
    uv.reserve(static_cast<std::size_t>(cols) * rows);
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i) {
            const double u = i == nu ? s.u1 : s.u0 + i * du;
            const double v = j == nv ? s.v1 : s.v0 + j * dv;
            uv.emplace_back(u, v);
            pos.push_back(s(u, v));
        }
    auto id = [&](int i, int j) { return (j % rows) * cols + (i % cols); };

    std::vector<Tri> tris;
    tris.reserve(static_cast<std::size_t>(2) * nu * nv);
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }

    auto radius = [&](int v) { return norm(pos[v] - pole); };

    if (!refine_near.empty()) {
        std::vector<char> marked(tris.size(), 0);
        for (std::size_t f = 0; f < tris.size(); ++f) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int v : tris[f]) {
                lo = std::min(lo, radius(v));
                hi = std::max(hi, radius(v));
            }
            for (double R : refine_near)
                if (lo < R && R < hi) marked[f] = 1;
        }
        // conforming closure: a triangle with two or more split edges is split fully
        std::unordered_set<std::uint64_t> split;
        for (bool changed = true; changed;) {
            changed = false;
            split.clear();
            for (std::size_t f = 0; f < tris.size(); ++f)
                if (marked[f])
                    for (int e = 0; e < 3; ++e) split.insert(edge_key(tris[f][e], tris[f][(e + 1) % 3]));
            for (std::size_t f = 0; f < tris.size(); ++f) {
                if (marked[f]) continue;
                int n = 0;
                for (int e = 0; e < 3; ++e) n += split.count(edge_key(tris[f][e], tris[f][(e + 1) % 3])) ? 1 : 0;
                if (n >= 2) {
                    marked[f] = 1;
                    changed = true;
                }
            }
        }
        std::unordered_map<std::uint64_t, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = edge_key(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            auto [ua, va] = uv[a];
            auto [ub, vb] = uv[b];
            const double pu = s.u1 - s.u0, pv = s.v1 - s.v0;
            if (s.periodic_u && std::abs(ub - ua) > 0.5 * pu) ub += ub < ua ? pu : -pu;
            if (s.periodic_v && std::abs(vb - va) > 0.5 * pv) vb += vb < va ? pv : -pv;
            double um = 0.5 * (ua + ub), vm = 0.5 * (va + vb);
            if (s.periodic_u && um >= s.u1) um -= pu;
            if (s.periodic_u && um < s.u0) um += pu;
            if (s.periodic_v && vm >= s.v1) vm -= pv;
            if (s.periodic_v && vm < s.v0) vm += pv;
            const int idx = static_cast<int>(pos.size());
            uv.emplace_back(um, vm);
            pos.push_back(s(um, vm));
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Tri> out;
        out.reserve(tris.size() * 2);
        for (std::size_t f = 0; f < tris.size(); ++f) {
            const Tri t = tris[f];
            if (marked[f]) {
                const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
                out.push_back({t[0], ab, ca});
                out.push_back({ab, t[1], bc});
                out.push_back({ca, bc, t[2]});
                out.push_back({ab, bc, ca});
                continue;
            }
            int e = 0;
            for (; e < 3; ++e)
                if (split.count(edge_key(t[e], t[(e + 1) % 3]))) break;
            if (e == 3) {
                out.push_back(t);
                continue;
            }
            const int a = t[e], b = t[(e + 1) % 3], c = t[(e + 2) % 3];
            const int m = mid(a, b);
            out.push_back({a, m, c});
            out.push_back({m, b, c});
        }
        tris = std::move(out);
    }

    // degenerate triangles
    double mean = 0.0;
    for (const Tri& t : tris) mean += triangle_area(pos[t[0]], pos[t[1]], pos[t[2]]);
    mean /= static_cast<double>(tris.size());
    for (std::size_t f = 0; f < tris.size(); ++f) {
        const double a = triangle_area(pos[tris[f][0]], pos[tris[f][1]], pos[tris[f][2]]);
        if (a < 1e-14 * mean)
            throw MeshError("degenerate triangle " + std::to_string(f) + " (area " + std::to_string(a) +
                            ", mean " + std::to_string(mean) + ")");
    }

    std::ostringstream label;
    label << s.name;
    for (const auto& [k, v] : s.params) label << " " << k << "=" << v;
    label << " " << nu << "x" << nv;
    if (!refine_near.empty()) label << " refined";
    TriMesh mesh = make_mesh(std::move(pos), std::move(tris), pole, label.str());
    if (s.periodic_u || s.periodic_v)
        for (std::size_t v = 0; v < uv.size(); ++v)
            if (mesh.tags[v] == VertexTag::Interior &&
                ((s.periodic_u && uv[v].first == s.u0) || (s.periodic_v && uv[v].second == s.v0)))
                mesh.tags[v] = VertexTag::Seam;

    if (!refine_near.empty()) {
        const double need = 1.2 * *std::max_element(refine_near.begin(), refine_near.end());
        if (mesh.min_truncation_radius() < need)
            throw CoverageError(s.name + " window reaches only r = " + std::to_string(mesh.min_truncation_radius()) +
                                    " on its truncation boundary; radius " + std::to_string(need) +
                                    " is not covered",
                                need);
    }
    return mesh;
}

// ------------------------------------------------------------ minimality

double minimality_residual(const TriMesh& mesh) {
    const std::size_t n = mesh.vertex_count();
    std::vector<Vec3> lap(n);
    for (const Tri& t : mesh.triangles) {
        const Vec3 p[3] = {mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]]};
        const auto cot = triangle_cotangents(p[0], p[1], p[2]);
        for (int k = 0; k < 3; ++k) {
            // edge opposite vertex k
            const int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
            const double w = 0.5 * cot[k];
            lap[i] += w * (mesh.positions[j] - mesh.positions[i]);
            lap[j] += w * (mesh.positions[i] - mesh.positions[j]);
        }
    }
    const std::vector<double> area = barycentric_areas(mesh);
    std::vector<double> values;
    for (std::size_t v = 0; v < n; ++v)
        if (mesh.tags[v] != VertexTag::OuterTruncation && area[v] > 0.0) values.push_back(norm(lap[v]) / area[v]);
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
    return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace warpgeom
