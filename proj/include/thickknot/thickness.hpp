#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "thickknot/curve.hpp"
#include "thickknot/kernels.hpp"

namespace thickknot {

struct ThicknessParams {
  double orthogonality_tolerance = 0.05;  // max |cos(chord, tangent)| at both ends
  double curvature_slack = kCurvatureSlack;
  double thickness_slack = 0.02;
  // Below this many vertices the pair search is an all-pairs scan; above it a
  // uniform grid restricts the scan to nearby pairs.
  std::size_t brute_force_below = 2048;
};

enum class PairSearch { Auto, AllPairs, SpatialHash };

/// A pair of curve points whose chord is (numerically) orthogonal to the
/// tangents at both ends. Indices are the nearest vertices; the chord length
/// comes from a sub-segment refinement on the interpolated polyline.
struct DoublyCriticalPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double chord_length = 0.0;
  double orthogonality_residual = 0.0;
  // True when the pair sits within 10% of the exclusion window; such pairs
  // may be discretisation artifacts and are kept but flagged.
  bool near_window = false;
};

std::vector<DoublyCriticalPair> doubly_critical_pairs(const DiscreteCurve& curve,
                                                      const ThicknessParams& params = {},
                                                      PairSearch search = PairSearch::Auto);

/// Smallest doubly critical chord, or +infinity when there is none.
double r2(const DiscreteCurve& curve, const ThicknessParams& params = {});

/// min(2, r2).
double thickness(const DiscreteCurve& curve, const ThicknessParams& params = {});

/// Distance queries against the tube around a polyline.
class TubeDistance {
 public:
  explicit TubeDistance(const DiscreteCurve& curve);

  double centerline_distance(const Vec3& q) const;
  /// Centerline distance minus the tube radius, clamped below at 0.
  double reach(const Vec3& q) const;
  double tube_radius() const { return radius_; }

 private:
  SegmentsSoA segments_;
  double radius_;
};

double reach_at(const DiscreteCurve& curve, const Vec3& query);

struct MembershipVerdict {
  double tau = 0.0;
  bool is_member = false;
  double max_curvature = 0.0;
  double thickness = 0.0;
  std::vector<std::string> reasons;
  // Knot type is never decided here.
  std::string unknottedness = "assumed";
};

/// Throws NotAKnot for open curves, InvalidArgument for tau outside [0, 2].
MembershipVerdict check_membership(const DiscreteCurve& curve, double tau,
                                   const ThicknessParams& params = {});

/// Same verdict computed from an existing report (no rescan).
MembershipVerdict membership_from_report(const GeometricReport& report, double tau,
                                         const ThicknessParams& params = {});

GeometricReport geometric_report(const DiscreteCurve& curve, const ThicknessParams& params = {});

}  // namespace thickknot
