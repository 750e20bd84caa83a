#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "thickknot/kernels.hpp"

namespace thickknot::kernels {
namespace {

inline double hmin(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

inline __m256d sq3(__m256d dx, __m256d dy, __m256d dz) {
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                       _mm256_mul_pd(dz, dz));
}

inline __m256d dot3(__m256d ax, __m256d ay, __m256d az, __m256d bx, __m256d by, __m256d bz) {
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)),
                       _mm256_mul_pd(az, bz));
}

void distance2_row(const Vec3& q, const PointsSoA& pts, std::size_t begin, std::size_t end,
                   double* out) {
  const __m256d qx = _mm256_set1_pd(q.x);
  const __m256d qy = _mm256_set1_pd(q.y);
  const __m256d qz = _mm256_set1_pd(q.z);
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&pts.x[j]), qx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&pts.y[j]), qy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&pts.z[j]), qz);
    _mm256_storeu_pd(out + (j - begin), sq3(dx, dy, dz));
  }
  scalar_table().distance2_row(q, pts, j, end, out + (j - begin));
}

void chord_row(const Vec3& p, const Vec3& tp, const PointsSoA& pts, const PointsSoA& tan,
               std::size_t begin, std::size_t end, double* d2, double* dot_p, double* dot_q) {
  const __m256d px = _mm256_set1_pd(p.x);
  const __m256d py = _mm256_set1_pd(p.y);
  const __m256d pz = _mm256_set1_pd(p.z);
  const __m256d tx = _mm256_set1_pd(tp.x);
  const __m256d ty = _mm256_set1_pd(tp.y);
  const __m256d tz = _mm256_set1_pd(tp.z);
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d cx = _mm256_sub_pd(_mm256_loadu_pd(&pts.x[j]), px);
    const __m256d cy = _mm256_sub_pd(_mm256_loadu_pd(&pts.y[j]), py);
    const __m256d cz = _mm256_sub_pd(_mm256_loadu_pd(&pts.z[j]), pz);
    const std::size_t k = j - begin;
    _mm256_storeu_pd(d2 + k, sq3(cx, cy, cz));
    _mm256_storeu_pd(dot_p + k, dot3(cx, cy, cz, tx, ty, tz));
    _mm256_storeu_pd(dot_q + k, dot3(cx, cy, cz, _mm256_loadu_pd(&tan.x[j]),
                                     _mm256_loadu_pd(&tan.y[j]), _mm256_loadu_pd(&tan.z[j])));
  }
  const std::size_t k = j - begin;
  scalar_table().chord_row(p, tp, pts, tan, j, end, d2 + k, dot_p + k, dot_q + k);
}

double min_distance2(const Vec3& q, const PointsSoA& pts, std::size_t begin, std::size_t end) {
  const __m256d qx = _mm256_set1_pd(q.x);
  const __m256d qy = _mm256_set1_pd(q.y);
  const __m256d qz = _mm256_set1_pd(q.z);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&pts.x[j]), qx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&pts.y[j]), qy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&pts.z[j]), qz);
    best = _mm256_min_pd(best, sq3(dx, dy, dz));
  }
  return std::min(hmin(best), scalar_table().min_distance2(q, pts, j, end));
}

double max_distance2(const Vec3& q, const PointsSoA& pts, std::size_t begin, std::size_t end) {
  const __m256d qx = _mm256_set1_pd(q.x);
  const __m256d qy = _mm256_set1_pd(q.y);
  const __m256d qz = _mm256_set1_pd(q.z);
  __m256d best = _mm256_setzero_pd();
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&pts.x[j]), qx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&pts.y[j]), qy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&pts.z[j]), qz);
    best = _mm256_max_pd(best, sq3(dx, dy, dz));
  }
  return std::max(hmax(best), scalar_table().max_distance2(q, pts, j, end));
}

double min_segment_distance2(const Vec3& q, const SegmentsSoA& s) {
  const __m256d qx = _mm256_set1_pd(q.x);
  const __m256d qy = _mm256_set1_pd(q.y);
  const __m256d qz = _mm256_set1_pd(q.z);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const std::size_t n = s.size();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d wx = _mm256_sub_pd(qx, _mm256_loadu_pd(&s.ax[j]));
    const __m256d wy = _mm256_sub_pd(qy, _mm256_loadu_pd(&s.ay[j]));
    const __m256d wz = _mm256_sub_pd(qz, _mm256_loadu_pd(&s.az[j]));
    const __m256d ex = _mm256_loadu_pd(&s.ex[j]);
    const __m256d ey = _mm256_loadu_pd(&s.ey[j]);
    const __m256d ez = _mm256_loadu_pd(&s.ez[j]);
    __m256d t = _mm256_mul_pd(dot3(wx, wy, wz, ex, ey, ez), _mm256_loadu_pd(&s.inv_len2[j]));
    t = _mm256_min_pd(one, _mm256_max_pd(zero, t));
    const __m256d dx = _mm256_sub_pd(wx, _mm256_mul_pd(ex, t));
    const __m256d dy = _mm256_sub_pd(wy, _mm256_mul_pd(ey, t));
    const __m256d dz = _mm256_sub_pd(wz, _mm256_mul_pd(ez, t));
    best = _mm256_min_pd(best, sq3(dx, dy, dz));
  }
  double tail = std::numeric_limits<double>::infinity();
  for (; j < n; ++j) {
    const double wx = q.x - s.ax[j];
    const double wy = q.y - s.ay[j];
    const double wz = q.z - s.az[j];
    double t = ((wx * s.ex[j] + wy * s.ey[j]) + wz * s.ez[j]) * s.inv_len2[j];
    t = std::min(1.0, std::max(0.0, t));
    const double dx = wx - s.ex[j] * t;
    const double dy = wy - s.ey[j] * t;
    const double dz = wz - s.ez[j] * t;
    tail = std::min(tail, (dx * dx + dy * dy) + dz * dz);
  }
  return std::min(hmin(best), tail);
}

}  // namespace

const Table& avx2_table_impl() {
  static const Table table{Isa::Avx2, distance2_row, chord_row, min_distance2, max_distance2,
                           min_segment_distance2};
  return table;
}

}  // namespace thickknot::kernels
