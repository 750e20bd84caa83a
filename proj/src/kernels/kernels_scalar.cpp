#include <algorithm>
#include <limits>

#include "thickknot/kernels.hpp"

namespace thickknot {

PointsSoA::PointsSoA(std::span<const Vec3> points) {
  x.reserve(points.size());
  y.reserve(points.size());
  z.reserve(points.size());
  for (const Vec3& p : points) {
    x.push_back(p.x);
    y.push_back(p.y);
    z.push_back(p.z);
  }
}

SegmentsSoA::SegmentsSoA(std::span<const Vec3> points, bool closed) {
  const std::size_t n = points.size();
  const std::size_t count = n < 2 ? 0 : (closed ? n : n - 1);
  for (auto* v : {&ax, &ay, &az, &ex, &ey, &ez, &inv_len2}) v->reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3& a = points[i];
    const Vec3 e = points[(i + 1) % n] - a;
    const double l2 = norm2(e);
    ax.push_back(a.x);
    ay.push_back(a.y);
    az.push_back(a.z);
    ex.push_back(e.x);
    ey.push_back(e.y);
    ez.push_back(e.z);
    inv_len2.push_back(l2 > 0.0 ? 1.0 / l2 : 0.0);
  }
}

namespace kernels {
namespace {

void distance2_row(const Vec3& q, const PointsSoA& pts, std::size_t begin, std::size_t end,
                   double* out) {
  for (std::size_t j = begin; j < end; ++j) {
    const double dx = pts.x[j] - q.x;
    const double dy = pts.y[j] - q.y;
    const double dz = pts.z[j] - q.z;
    out[j - begin] = (dx * dx + dy * dy) + dz * dz;
  }
}

void chord_row(const Vec3& p, const Vec3& tp, const PointsSoA& pts, const PointsSoA& tan,
               std::size_t begin, std::size_t end, double* d2, double* dot_p, double* dot_q) {
  for (std::size_t j = begin; j < end; ++j) {
    const double cx = pts.x[j] - p.x;
    const double cy = pts.y[j] - p.y;
    const double cz = pts.z[j] - p.z;
    const std::size_t k = j - begin;
    d2[k] = (cx * cx + cy * cy) + cz * cz;
    dot_p[k] = (cx * tp.x + cy * tp.y) + cz * tp.z;
    dot_q[k] = (cx * tan.x[j] + cy * tan.y[j]) + cz * tan.z[j];
  }
}

double min_distance2(const Vec3& q, const PointsSoA& pts, std::size_t begin, std::size_t end) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = begin; j < end; ++j) {
    const double dx = pts.x[j] - q.x;
    const double dy = pts.y[j] - q.y;
    const double dz = pts.z[j] - q.z;
    best = std::min(best, (dx * dx + dy * dy) + dz * dz);
  }
  return best;
}

double max_distance2(const Vec3& q, const PointsSoA& pts, std::size_t begin, std::size_t end) {
  double best = 0.0;
  for (std::size_t j = begin; j < end; ++j) {
    const double dx = pts.x[j] - q.x;
    const double dy = pts.y[j] - q.y;
    const double dz = pts.z[j] - q.z;
    best = std::max(best, (dx * dx + dy * dy) + dz * dz);
  }
  return best;
}

double min_segment_distance2(const Vec3& q, const SegmentsSoA& s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double wx = q.x - s.ax[j];
    const double wy = q.y - s.ay[j];
    const double wz = q.z - s.az[j];
    double t = ((wx * s.ex[j] + wy * s.ey[j]) + wz * s.ez[j]) * s.inv_len2[j];
    t = std::min(1.0, std::max(0.0, t));
    const double dx = wx - s.ex[j] * t;
    const double dy = wy - s.ey[j] * t;
    const double dz = wz - s.ez[j] * t;
    best = std::min(best, (dx * dx + dy * dy) + dz * dz);
  }
  return best;
}

}  // namespace

const Table& scalar_table() {
  static const Table table{Isa::Scalar, distance2_row, chord_row, min_distance2, max_distance2,
                           min_segment_distance2};
  return table;
}

}  // namespace kernels
}  // namespace thickknot
