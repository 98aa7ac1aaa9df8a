#include "warpgeom/geometry.hpp"

namespace warpgeom {

std::array<double, 3> triangle_cotangents(Vec3 a, Vec3 b, Vec3 c) {
    const double twice_area = norm(cross(b - a, c - a));
    if (twice_area == 0.0) return {0.0, 0.0, 0.0};
    return {dot(b - a, c - a) / twice_area, dot(c - b, a - b) / twice_area, dot(a - c, b - c) / twice_area};
}

}  // namespace warpgeom
