#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "thickknot/curve.hpp"

namespace thickknot {

enum class DubinsWord { LRL, RLR, LSL, LSR, RSL, RSR };

std::string_view to_string(DubinsWord word);
bool is_ccc(DubinsWord word);

enum class SegmentKind { Arc, Line };

/// One piece of a Dubins path in its local 2D frame. `signed_curvature` is
/// +1 for a left turn, -1 for a right turn and 0 for a line.
struct DubinsSegment {
  SegmentKind kind = SegmentKind::Line;
  double length = 0.0;
  int signed_curvature = 0;
  double x = 0.0, y = 0.0, heading = 0.0;  // local start pose
};

/// Planar pose used by the closed-form solver.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Feasible candidate for one word: segment lengths (t, p, q).
struct DubinsCandidate {
  DubinsWord word;
  std::array<double, 3> lengths;
  double total() const { return lengths[0] + lengths[1] + lengths[2]; }
};

/// All feasible classical candidates from `start` to `end` with unit turning
/// radius, in the fixed order LRL, RLR, LSL, LSR, RSL, RSR.
std::vector<DubinsCandidate> dubins_candidates(const Pose2& start, const Pose2& end);

/// Shortest unit-radius path between two coplanar configurations in space.
struct DubinsPath {
  DubinsWord word = DubinsWord::LSL;
  std::vector<DubinsSegment> segments;
  double total_length = 0.0;
  // Embedding plane: origin, in-plane axes and normal.
  Vec3 origin, axis_x, axis_y, normal;

  Configuration start() const { return sample(0.0); }
  Configuration end() const { return sample(total_length); }
  /// Configuration at arc length s, clamped to [0, total_length].
  Configuration sample(double s) const;
  /// Points at uniform spacing close to `spacing`, endpoints included.
  std::vector<Vec3> sample_points(double spacing) const;
};

/// Throws NonPlanarInput when the two tangents and the displacement do not
/// span a plane, Infeasible if no candidate exists (guard only).
DubinsPath solve_dubins(const Configuration& start, const Configuration& end);

/// A cap joins `from` to `to`; both tangents point along the direction of
/// travel around the closed curve.
struct CapPair {
  Configuration from;
  Configuration to;
};

struct CapJunctions {
  CapPair top;
  CapPair bottom;
};

/// Junction data for a two-strand core whose strands both run from the
/// bottom wall to the top wall. Travel goes up the first strand, over the top
/// cap, down the second strand and back through the bottom cap.
CapJunctions cap_junctions(const CurveBundle& core);

struct CappedCurve {
  DiscreteCurve curve;
  DubinsPath top;
  DubinsPath bottom;
  // Vertex ranges [begin, end] of each cap in `curve`, endpoints included.
  std::size_t top_begin = 0, top_end = 0, bottom_begin = 0, bottom_end = 0;
  double max_position_mismatch = 0.0;
  double max_tangent_mismatch = 0.0;
  double min_cap_core_distance = 0.0;
};

/// Closes a two-strand open core with two planar Dubins caps sampled at the
/// core's segment length. Throws PreconditionViolated when the strand ends do
/// not match `ends` within 1e-6, CapCollision when a cap comes closer than
/// 2 * tube_radius to the core.
CappedCurve close_open_curve(const CurveBundle& core, const CapJunctions& ends, double tube_radius);

}  // namespace thickknot
