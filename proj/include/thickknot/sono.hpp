#pragma once

// Shrink-on-no-overlap tightening: repeatedly shrink the curve a little,
// re-equalise its sampling, then push apart any beads that came closer than
// the target thickness and smooth away curvature above the bound.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "thickknot/curve.hpp"

namespace thickknot {

/// Two planes z = z_low and z = z_high. Open components keep their end
/// configurations fixed and every vertex is projected into the slab.
struct WallPlanes {
  double z_low = 0.0;
  double z_high = 12.0;
};

struct TightenConfig {
  double target_thickness = 2.0;
  double shrink_rate = 0.9995;
  int overlap_push_iters = 50;
  int max_iters = 20000;
  // Stop once the mean relative length change per iteration over the last
  // `stall_window` iterations drops below `stall_tolerance`.
  double stall_tolerance = 1e-7;
  int stall_window = 1000;
  std::optional<WallPlanes> walls;
  std::uint64_t seed = 0;
  double curvature_slack = kCurvatureSlack;
  double thickness_slack = 0.02;
  // Every this many iterations the length is recorded and the observer runs.
  int sample_every = 50;
};

struct Overlap {
  // Global vertex indices (components concatenated in order).
  std::size_t a = 0;
  std::size_t b = 0;
  double depth = 0.0;
};

/// Vertex pairs closer than tau. Pairs on the same component are skipped
/// when they lie within pi * max(tau / 2, h) of each other along the curve.
/// Sorted by (a, b).
std::vector<Overlap> detect_overlaps(const CurveBundle& bundle, double tau);
std::vector<Overlap> detect_overlaps(const DiscreteCurve& curve, double tau);

struct OverlapRemoval {
  CurveBundle bundle;
  double max_penetration = 0.0;
  int sweeps = 0;
  bool resolved = true;  // false means OverlapStuck
};

/// Pushes each overlapping pair apart along its chord by depth / 2 plus a
/// small margin, spread over a few neighbouring vertices so no kink forms.
/// Stops when the deepest penetration is at most 1e-3 * tau or after
/// `sweeps` passes. Vertices flagged in `fixed` never move.
OverlapRemoval remove_overlaps(const CurveBundle& bundle, double tau, int sweeps = 50,
                               const std::vector<std::vector<bool>>* fixed = nullptr);
DiscreteCurve remove_overlaps(const DiscreteCurve& curve, double tau, int sweeps = 50);

/// Moves vertices whose curvature estimate exceeds `bound` toward the
/// midpoint of their neighbours, at most one segment length per sweep.
CurveBundle control_curvature(const CurveBundle& bundle, double bound = 1.0, int sweeps = 200,
                              const std::vector<std::vector<bool>>* fixed = nullptr);
DiscreteCurve control_curvature(const DiscreteCurve& curve, double bound = 1.0, int sweeps = 200);

/// Uniform scaling about the centroid; the tube radius is left alone.
DiscreteCurve shrink_step(const DiscreteCurve& curve, double rate);

struct TightenSample {
  int iteration = 0;
  double length = 0.0;
  const CurveBundle* bundle = nullptr;
};

struct TightenResult {
  CurveBundle final_bundle;
  DiscreteCurve final_curve;  // first component, for single-curve callers
  GeometricReport report;      // of final_curve
  int iterations = 0;
  bool converged = false;
  std::vector<double> length_history;
  double max_penetration = 0.0;
};

using TightenObserver = std::function<void(const TightenSample&)>;

/// Closed curve tightening. Throws InfeasibleStart when the starting curve
/// violates the constraints and the repair phase cannot fix it.
TightenResult tighten(const DiscreteCurve& curve, const TightenConfig& config,
                      const TightenObserver& observer = {});

/// Open tightening between wall planes. Every component must start on the
/// lower wall and end on the upper one with tangents along +z; the first two
/// and last two vertices of each component stay clamped.
TightenResult tighten_open(const CurveBundle& core, const TightenConfig& config,
                           const TightenObserver& observer = {});
TightenResult tighten_open(const DiscreteCurve& core, const TightenConfig& config,
                           const TightenObserver& observer = {});

}  // namespace thickknot
