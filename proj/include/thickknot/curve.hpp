#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "thickknot/geometry.hpp"

namespace thickknot {

/// Default slack on the unit curvature bound for discretised curves.
inline constexpr double kCurvatureSlack = 0.02;

/// A polyline core of a tube, in units where the minimum turning radius is 1.
/// Closed curves carry an implicit segment from the last point to the first.
struct DiscreteCurve {
  std::vector<Vec3> points;
  bool closed = false;
  double tube_radius = 0.0;

  std::size_t size() const { return points.size(); }
  std::size_t segment_count() const {
    return points.size() < 2 ? 0 : (closed ? points.size() : points.size() - 1);
  }
  Vec3 segment(std::size_t i) const { return points[(i + 1) % points.size()] - points[i]; }

  friend bool operator==(const DiscreteCurve&, const DiscreteCurve&) = default;
};

/// Several open or closed components that are handled together, e.g. the two
/// strands of a doubled core.
struct CurveBundle {
  std::vector<DiscreteCurve> components;

  std::size_t total_points() const;
};

/// Oriented point: position plus unit tangent.
struct Configuration {
  Vec3 position;
  Vec3 tangent;

  /// Normalises `tangent`; throws InvalidArgument for a zero tangent.
  static Configuration make(const Vec3& position, const Vec3& tangent);
  Configuration reversed() const { return {position, -tangent}; }
};

struct GeometricReport {
  double length = 0.0;
  double max_curvature = 0.0;
  double r2 = std::numeric_limits<double>::infinity();
  double thickness = 0.0;
  double diameter = 0.0;
};

/// Throws DegenerateCurve / InvalidArgument when the structural invariants
/// (point counts, distinct consecutive points, radius range) do not hold.
void validate(const DiscreteCurve& curve);

double length(const DiscreteCurve& curve);
double diameter(const DiscreteCurve& curve);
std::vector<double> segment_lengths(const DiscreteCurve& curve);
double mean_segment_length(const DiscreteCurve& curve);

/// Cumulative arc length at each vertex (starting at 0) and the total length.
struct ArcLength {
  std::vector<double> s;
  double total = 0.0;
  bool closed = false;

  explicit ArcLength(const DiscreteCurve& curve);
  /// Distance along the curve, going the short way round for closed curves.
  double distance(std::size_t i, std::size_t j) const;
};

/// Unit tangents per vertex: central differences, one-sided at open ends.
std::vector<Vec3> vertex_tangents(const DiscreteCurve& curve);

/// Circumscribed-circle curvature 2 sin(phi/2) / mean adjacent segment length.
/// One value per vertex for closed curves; for open curves one value per
/// interior vertex (entry k belongs to vertex k + 1).
std::vector<double> discrete_curvature(const DiscreteCurve& curve);
/// Curvature estimate at vertex i; 0 at open endpoints.
double curvature_at(const DiscreteCurve& curve, std::size_t i);
double max_curvature(const DiscreteCurve& curve);

/// Re-distributes n points uniformly in arc length along the polyline.
/// The output is iterated to a fixed point, so segment lengths are equal to
/// rounding and resampling again with the same n is a no-op.
DiscreteCurve resample(const DiscreteCurve& curve, std::size_t n);

/// A single placement pass of resample: cheaper, and the spacing is only
/// uniform to first order in the local curvature.
DiscreteCurve resample_once(const DiscreteCurve& curve, std::size_t n);

/// Smooth deterministic displacement of at most `amplitude` per vertex
/// (low-frequency random modes), followed by resampling to the same size.
/// Open curves keep their endpoints and end tangents.
DiscreteCurve perturb(const DiscreteCurve& curve, double amplitude, std::uint64_t seed);

/// Arc-length exclusion window for self-distance scans: pairs closer than
/// this along the curve are never compared. pi * max(r, h), with a small
/// slack so that exactly antipodal pairs on a saturated circle stay visible.
double exclusion_window(double tube_radius, double segment_length);

/// Applies x -> scale * (x - center) + center to every point.
DiscreteCurve scaled(const DiscreteCurve& curve, double scale, const Vec3& center);
Vec3 centroid(const DiscreteCurve& curve);

}  // namespace thickknot
