#pragma once

// Data-parallel inner loops shared by the thickness, overlap, reach and
// diameter scans. Every kernel has a scalar reference implementation and,
// on x86-64, an AVX2 variant picked at runtime. Both variants evaluate the
// same floating point expression tree, so their outputs are bit-identical
// (the build disables FMA contraction).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "thickknot/geometry.hpp"

namespace thickknot {

/// Structure-of-arrays copy of a point sequence.
struct PointsSoA {
  std::vector<double> x, y, z;

  PointsSoA() = default;
  explicit PointsSoA(std::span<const Vec3> points);

  std::size_t size() const { return x.size(); }
  Vec3 operator[](std::size_t i) const { return {x[i], y[i], z[i]}; }
};

/// Segments a_i + t * e_i, t in [0, 1], with precomputed 1/|e_i|^2
/// (zero for degenerate segments).
struct SegmentsSoA {
  std::vector<double> ax, ay, az, ex, ey, ez, inv_len2;

  SegmentsSoA() = default;
  /// Segments between consecutive points, plus the closing one if `closed`.
  SegmentsSoA(std::span<const Vec3> points, bool closed);

  std::size_t size() const { return ax.size(); }
};

namespace kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct Table {
  Isa isa;
  // out[j] = |q - p_j|^2 for j in [begin, end)
  void (*distance2_row)(const Vec3& q, const PointsSoA& pts, std::size_t begin,
                        std::size_t end, double* out);
  // For chords c_j = p_j - p: d2[j] = |c_j|^2, dot_p[j] = c_j . tp,
  // dot_q[j] = c_j . t_j.
  void (*chord_row)(const Vec3& p, const Vec3& tp, const PointsSoA& pts,
                    const PointsSoA& tangents, std::size_t begin, std::size_t end,
                    double* d2, double* dot_p, double* dot_q);
  // min_j |q - p_j|^2 over [begin, end); +inf if empty.
  double (*min_distance2)(const Vec3& q, const PointsSoA& pts, std::size_t begin,
                          std::size_t end);
  // max_j |q - p_j|^2 over [begin, end); 0 if empty.
  double (*max_distance2)(const Vec3& q, const PointsSoA& pts, std::size_t begin,
                          std::size_t end);
  // min over segments of the squared point-segment distance; +inf if empty.
  double (*min_segment_distance2)(const Vec3& q, const SegmentsSoA& segs);
};

const Table& scalar_table();
/// nullptr when the build or the CPU lacks AVX2.
const Table* avx2_table();

/// The table in use. Honors THICKKNOT_SIMD=scalar|avx2|auto (default auto).
const Table& active();

}  // namespace kernels
}  // namespace thickknot
