#include "gifs/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace gifs {

Vec3 closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 <= 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 n = cross(ab, ac);
  const double scale = std::max({squared_norm(ab), squared_norm(ac), squared_norm(c - b)});
  if (squared_norm(n) <= 1e-24 * scale * scale) {
    // Collinear or collapsed: the closest point lies on one of the edges.
    Vec3 best = closest_point_on_segment(p, a, b);
    for (const Vec3& q : {closest_point_on_segment(p, b, c), closest_point_on_segment(p, c, a)}) {
      if (squared_distance(p, q) < squared_distance(p, best)) best = q;
    }
    return best;
  }

  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_squared_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  return squared_distance(p, closest_point_on_triangle(p, a, b, c));
}

double segment_segment_squared_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                                        const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = squared_norm(d1);
  const double e = squared_norm(d2);
  const double f = dot(d2, r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) return squared_norm(r);
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return squared_distance(p0 + d1 * s, q0 + d2 * t);
}

bool segment_intersects_triangle(const Segment& seg, const Vec3& a, const Vec3& b, const Vec3& c,
                                 double eps) {
  const Vec3 n = cross(b - a, c - a);
  const double n_len = norm(n);
  const double eps2 = eps * eps;

  if (n_len > 0.0) {
    const Vec3 unit = n / n_len;
    const double ha = dot(unit, seg.a - a);
    const double hb = dot(unit, seg.b - a);
    if ((ha > eps && hb > eps) || (ha < -eps && hb < -eps)) return false;
    if ((ha > eps && hb < -eps) || (ha < -eps && hb > eps)) {
      const double t = ha / (ha - hb);
      const Vec3 q = seg.a + (seg.b - seg.a) * t;
      return point_triangle_squared_distance(q, a, b, c) <= eps2;
    }
  }

  // An endpoint lies within eps of the supporting plane, or the segment is
  // coplanar, or the triangle is degenerate.
  if (point_triangle_squared_distance(seg.a, a, b, c) <= eps2) return true;
  if (point_triangle_squared_distance(seg.b, a, b, c) <= eps2) return true;
  return segment_segment_squared_distance(seg.a, seg.b, a, b) <= eps2 ||
         segment_segment_squared_distance(seg.a, seg.b, b, c) <= eps2 ||
         segment_segment_squared_distance(seg.a, seg.b, c, a) <= eps2;
}

bool segment_overlaps_box(const Segment& seg, const Aabb& box, double pad) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec3 d = seg.b - seg.a;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = box.lo[axis] - pad;
    const double hi = box.hi[axis] + pad;
    const double o = seg.a[axis];
    if (d[axis] == 0.0) {
      if (o < lo || o > hi) return false;
      continue;
    }
    const double inv = 1.0 / d[axis];
    double ta = (lo - o) * inv;
    double tb = (hi - o) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace gifs
