#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "thickknot/curve.hpp"
#include "thickknot/dubins.hpp"
#include "thickknot/sono.hpp"

namespace thickknot {

DiscreteCurve round_circle(double radius, std::size_t n, double tube_radius = 0.0);

/// Open overhand (trefoil arc) from (0,0,0) to (0,0,wall_gap) with both end
/// tangents along +z, inside the slab 0 <= z <= wall_gap, with curvature
/// repaired to at most 1. It is a seed for tightening and need not be thick
/// yet. Throws InfeasibleSeed if the repaired seed still violates the
/// curvature bound or leaves the slab.
DiscreteCurve open_overhand(double wall_gap = 12.0, std::size_t n = 640);

/// Two strands base +- offset * normal along a rotation-minimizing frame.
/// The frame starts from `initial_normal` when given; otherwise its starting
/// angle is chosen to keep the offsets as straight as possible. With
/// `strict`, an offset whose curvature exceeds 1 + slack throws
/// OffsetCurvatureViolation naming the vertex.
CurveBundle doubled_core(const DiscreteCurve& core, double offset = 0.5, bool strict = true,
                         double curvature_slack = kCurvatureSlack, std::optional<Vec3> initial_normal = std::nullopt);

struct BuildOptions {
  double wall_gap = 12.0;
  std::size_t core_points = 640;
  int single_iters = 6000;   // tightening of the tau = 2 overhand
  int double_iters = 3000;   // tightening of the two tau = 1 strands
  std::uint64_t seed = 0;
  // Sees the two strands during their tightening, every `strand_sample_every`
  // iterations.
  TightenObserver strand_observer;
  int strand_sample_every = 50;
};

/// Everything the pipeline produced on the way to a closed K0.
struct KnotBuild {
  DiscreteCurve curve;            // closed, tube radius 1/2
  DiscreteCurve tight_core;       // tau = 2 overhand after tightening
  CurveBundle doubled;            // two tau = 1 strands after tightening
  CappedCurve capped;
  std::vector<std::string> notes;  // construction choices, for metadata
};

KnotBuild build_K0(const BuildOptions& options = {});

/// n copies of the doubled core stacked along z and joined by straight
/// vertical tubes, capped at the top and bottom. n >= 1.
struct StackBuild {
  DiscreteCurve curve;
  double module_length = 0.0;  // one doubled core
  double joiner_length = 0.0;  // one pair of vertical joiners
  double cap_length = 0.0;     // both caps together
  std::vector<std::string> notes;
};

StackBuild build_Kn(std::size_t n, const BuildOptions& options = {});
StackBuild build_Kn_from(const KnotBuild& k0, std::size_t n);

enum class ShapeKind { UnitArc, Straight, Helix, Other };
std::string_view to_string(ShapeKind kind);

struct SegmentLabel {
  std::size_t begin = 0;  // first vertex
  std::size_t end = 0;    // last vertex, inclusive; may wrap on closed curves
  ShapeKind kind = ShapeKind::Other;
  double fit_residual = 0.0;
};

struct ClassifyThresholds {
  double relative_tolerance = 0.05;  // curvature / torsion spread
  double straight_curvature = 0.05;  // below this a window is straight
  std::size_t min_run = 5;           // shorter runs are merged into neighbours
};

/// Labels maximal runs of vertices as unit-radius arcs, straight pieces,
/// helices (constant curvature and torsion) or other.
std::vector<SegmentLabel> classify_segments(const DiscreteCurve& curve, const ClassifyThresholds& t = {});

enum class UnknotVerdict { Unknotted, Nontrivial, Inconclusive };
std::string_view to_string(UnknotVerdict verdict);

struct UnknotReport {
  UnknotVerdict verdict = UnknotVerdict::Inconclusive;
  std::size_t remaining_vertices = 0;
  std::size_t min_crossings = 0;
};

/// Heuristic knot check, no curvature or thickness constraints: shortcuts
/// the polygon through triangles that no other edge pierces (so no strand
/// ever passes through another). Unknotted if it collapses to a triangle,
/// nontrivial if it gets stuck with at least 3 crossings in every sampled
/// projection, inconclusive otherwise.
UnknotReport unconstrained_unknot_check(const DiscreteCurve& curve, std::uint64_t seed = 0);

/// Closes an open curve whose ends lie on the walls z = 0 and z = h with a
/// return path far outside the slab, for knot checks.
DiscreteCurve close_far(const DiscreteCurve& open);

}  // namespace thickknot
