#include "warpgeom/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "warpgeom/error.hpp"

namespace warpgeom {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Next line that is not blank and not a comment; strips trailing comments.
bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

void fan(const std::vector<int>& poly, std::vector<Tri>& out) {
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) out.push_back({poly[0], poly[k], poly[k + 1]});
}

double read_double(std::istringstream& ss, std::size_t lineno, const char* what) {
    std::string tok;
    if (!(ss >> tok)) throw MeshError(std::string("missing ") + what, lineno);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw MeshError("bad number '" + tok + "'", lineno);
    return v;
}

}  // namespace

MeshFormat parse_mesh_format(std::string_view name) {
    std::string s = lower(name);
    if (s == "auto" || s.empty()) return MeshFormat::Auto;
    if (s == "off") return MeshFormat::Off;
    if (s == "obj") return MeshFormat::Obj;
    throw PreconditionError("unknown mesh format '" + std::string(name) + "' (expected off or obj)");
}

TriMesh read_off(std::istream& in, Vec3 pole, std::string label) {
    std::string line;
    std::size_t lineno = 0;
    if (!next_content_line(in, line, lineno)) throw MeshError("empty OFF file", 1);
    std::istringstream head(line);
    std::string magic;
    head >> magic;
    if (magic != "OFF") throw MeshError("missing OFF header", lineno);
    long nv = -1, nf = -1, ne = 0;
    if (!(head >> nv)) {
        if (!next_content_line(in, line, lineno)) throw MeshError("missing element counts", lineno);
        std::istringstream counts(line);
        if (!(counts >> nv >> nf)) throw MeshError("malformed element counts", lineno);
        counts >> ne;
    } else if (!(head >> nf)) {
        throw MeshError("malformed element counts", lineno);
    }
    if (nv < 0 || nf < 0) throw MeshError("negative element counts", lineno);

    std::vector<Vec3> pos;
    pos.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line, lineno)) throw MeshError("unexpected end of file in vertex list", lineno + 1);
        std::istringstream ss(line);
        Vec3 p;
        p.x = read_double(ss, lineno, "x coordinate");
        p.y = read_double(ss, lineno, "y coordinate");
        p.z = read_double(ss, lineno, "z coordinate");
        pos.push_back(p);
    }
    std::vector<Tri> tris;
    for (long f = 0; f < nf; ++f) {
        if (!next_content_line(in, line, lineno)) throw MeshError("unexpected end of file in face list", lineno + 1);
        std::istringstream ss(line);
        long k = 0;
        if (!(ss >> k) || k < 3) throw MeshError("face needs at least 3 vertices", lineno);
        std::vector<int> poly;
        for (long j = 0; j < k; ++j) {
            long idx = 0;
            if (!(ss >> idx)) throw MeshError("face has fewer indices than declared", lineno);
            if (idx < 0 || idx >= nv) throw MeshError("vertex index " + std::to_string(idx) + " out of range", lineno);
            poly.push_back(static_cast<int>(idx));
        }
        fan(poly, tris);
    }
    return make_mesh(std::move(pos), std::move(tris), pole, std::move(label));
}

TriMesh read_obj(std::istream& in, Vec3 pole, std::string label) {
    std::vector<Vec3> pos;
    std::vector<Tri> tris;
    std::string line;
    std::size_t lineno = 0;
    while (next_content_line(in, line, lineno)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 p;
            p.x = read_double(ss, lineno, "x coordinate");
            p.y = read_double(ss, lineno, "y coordinate");
            p.z = read_double(ss, lineno, "z coordinate");
            pos.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ss >> tok) {
                const std::string head = tok.substr(0, tok.find('/'));
                char* end = nullptr;
                long idx = std::strtol(head.c_str(), &end, 10);
                if (head.empty() || end != head.c_str() + head.size() || idx == 0)
                    throw MeshError("bad face index '" + tok + "'", lineno);
                const long n = static_cast<long>(pos.size());
                const long resolved = idx > 0 ? idx - 1 : n + idx;
                if (resolved < 0 || resolved >= n)
                    throw MeshError("vertex index " + std::to_string(idx) + " out of range", lineno);
                poly.push_back(static_cast<int>(resolved));
            }
            if (poly.size() < 3) throw MeshError("face needs at least 3 vertices", lineno);
            fan(poly, tris);
        }
        // vt, vn, o, g, s, usemtl, mtllib: ignored
    }
    if (pos.empty()) throw MeshError("OBJ file has no vertices");
    return make_mesh(std::move(pos), std::move(tris), pole, std::move(label));
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format, Vec3 pole) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file " + path.string());
    if (format == MeshFormat::Auto) {
        const std::string ext = lower(path.extension().string());
        if (ext == ".off")
            format = MeshFormat::Off;
        else if (ext == ".obj")
            format = MeshFormat::Obj;
        else
            throw PreconditionError("cannot infer mesh format from '" + path.string() + "'");
    }
    const std::string label = path.filename().string();
    return format == MeshFormat::Off ? read_off(in, pole, label) : read_obj(in, pole, label);
}

void write_off(const TriMesh& mesh, std::ostream& out) {
    out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << " 0\n";
    out << std::setprecision(17);
    for (const Vec3& p : mesh.positions) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
    for (const Tri& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace warpgeom
