#pragma once

#include "gifs/vec3.hpp"

namespace gifs {

struct Segment {
  Point3 a;
  Point3 b;
};

/// Closed-membership tolerance for segment/surface contact, in normalized
/// unit-cube units.
inline constexpr double kGeomEpsilon = 1e-9;

/// Closest point to `p` on triangle (a, b, c). Degenerate triangles fall
/// back to their longest edge.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

double point_triangle_squared_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

Vec3 closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b);

/// Squared distance between segments [p0, p1] and [q0, q1].
double segment_segment_squared_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                                        const Vec3& q1);

/// True when the closed segment touches the closed triangle within `eps`.
/// Transversal crossings take a fast path; near-plane and coplanar
/// configurations use exact segment/triangle distances, so a zero-length
/// segment reduces to point-on-triangle membership.
bool segment_intersects_triangle(const Segment& seg, const Vec3& a, const Vec3& b, const Vec3& c,
                                 double eps = kGeomEpsilon);

/// Slab test of a segment against a box grown by `pad` on every side.
bool segment_overlaps_box(const Segment& seg, const Aabb& box, double pad);

}  // namespace gifs
