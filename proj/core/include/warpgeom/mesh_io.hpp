#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "warpgeom/surfaces.hpp"

namespace warpgeom {

enum class MeshFormat { Auto, Off, Obj };

MeshFormat parse_mesh_format(std::string_view name);

/// ASCII OFF/OBJ reader (positions and faces only). Polygons are fan
/// triangulated; boundary vertices are tagged as outer truncation.
/// Throws MeshError (with a 1-based line number) or NonManifoldError.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto, Vec3 pole = {});
TriMesh read_off(std::istream& in, Vec3 pole = {}, std::string label = "off");
TriMesh read_obj(std::istream& in, Vec3 pole = {}, std::string label = "obj");

void write_off(const TriMesh& mesh, std::ostream& out);

}  // namespace warpgeom
