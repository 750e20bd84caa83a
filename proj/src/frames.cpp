#include "thickknot/frames.hpp"

#include <cmath>

namespace thickknot {

namespace {

Vec3 reflect(const Vec3& v, const Vec3& axis, double axis_norm2) {
  return v - axis * (2.0 / axis_norm2 * dot(axis, v));
}

Vec3 double_reflection_step(const Vec3& x0, const Vec3& x1, const Vec3& t0, const Vec3& t1,
                            const Vec3& r0) {
  const Vec3 v1 = x1 - x0;
  const double c1 = norm2(v1);
  if (!(c1 > 0.0)) return r0;
  const Vec3 r_left = reflect(r0, v1, c1);
  const Vec3 t_left = reflect(t0, v1, c1);
  const Vec3 v2 = t1 - t_left;
  const double c2 = norm2(v2);
  const Vec3 r1 = c2 > 0.0 ? reflect(r_left, v2, c2) : r_left;
  // Re-orthogonalise against drift.
  return normalized(r1 - t1 * dot(r1, t1));
}

}  // namespace

FramedCurve rotation_minimizing_frame(const DiscreteCurve& curve, std::optional<Vec3> initial_normal,
                                      bool distribute_holonomy) {
  FramedCurve out;
  out.base = curve;
  out.tangents = vertex_tangents(curve);
  const std::size_t n = curve.size();
  out.normals.resize(n);
  if (n == 0) return out;

  const Vec3& t0 = out.tangents[0];
  Vec3 start = initial_normal ? *initial_normal - t0 * dot(*initial_normal, t0) : Vec3{};
  if (!(norm(start) > 1e-12)) start = any_orthogonal(t0);
  out.normals[0] = normalized(start);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.normals[i + 1] = double_reflection_step(curve.points[i], curve.points[i + 1], out.tangents[i],
                                                out.tangents[i + 1], out.normals[i]);
  }

  if (curve.closed && distribute_holonomy && n > 2) {
    const Vec3 wrapped = double_reflection_step(curve.points[n - 1], curve.points[0],
                                                out.tangents[n - 1], out.tangents[0], out.normals[n - 1]);
    // Signed angle from the transported normal back to the starting one.
    const Vec3& r0 = out.normals[0];
    const double mismatch = std::atan2(dot(cross(wrapped, r0), t0), dot(wrapped, r0));
    for (std::size_t i = 1; i < n; ++i) {
      const double angle = mismatch * static_cast<double>(i) / static_cast<double>(n);
      out.normals[i] = normalized(rotate(out.normals[i], out.tangents[i], angle));
    }
  }
  return out;
}

}  // namespace thickknot
