#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thickknot/curve.hpp"
#include "thickknot/geometry.hpp"
#include "thickknot/trace.hpp"

namespace thickknot {

// ---------------------------------------------------------------- arcs

/// Unit ball B centred on an axis through `center` along `up`. The sphere S
/// is its boundary: a point is above S when it lies over the ball's upper
/// cap, i.e. within the unit cylinder around the axis and higher than the
/// sphere there.
struct ArcBall {
  Vec3 center;
  Vec3 up{0, 0, 1};
  double radius = 1.0;

  bool inside(const Vec3& p, double tol = 0.0) const { return distance(p, center) < radius - tol; }
  double boundary_gap(const Vec3& p) const { return std::abs(distance(p, center) - radius); }
  /// Height above S (negative when not above it); -inf outside the cylinder.
  double height_above_sphere(const Vec3& p) const;
};

/// Ball for an arc whose endpoints are at most 2 apart: both endpoints on
/// its boundary, the centre below the chord midpoint on the side away from
/// the arc's farthest point.
ArcBall ball_for_arc(const DiscreteCurve& arc);

enum class ArcKind { Short, Long, Neither };
std::string_view to_string(ArcKind kind);

struct ArcClass {
  ArcKind kind = ArcKind::Neither;
  bool on_boundary = false;      // whole arc on the sphere within h
  bool interior_inside = false;  // every interior vertex strictly inside B
  std::optional<std::size_t> above_vertex;  // witness for Long
  double max_height_above = -std::numeric_limits<double>::infinity();
};

/// Short / Long / Neither per the unit-ball definition. Throws
/// PreconditionViolated when an endpoint is more than 1e-6 off the sphere.
ArcClass classify_arc(const DiscreteCurve& arc, const ArcBall& ball);

/// Random 1-constrained arc (unit-speed integration of a random curvature
/// profile with |k| <= max_curvature) that starts on the sphere and stops the
/// first time it returns to it, or after max_length. Endpoints land on the
/// sphere within 1e-9 when it returns. `returned` tells which happened.
struct GeneratedArc {
  DiscreteCurve arc;
  bool returned = false;
};
GeneratedArc random_arc_from_sphere(const ArcBall& ball, std::uint64_t seed, double max_curvature = 1.0,
                                    double step = 0.01, double max_length = 20.0);

// ------------------------------------------------------------ aperture

struct ApertureTriple {
  std::vector<Vec3> contour;  // closed, ordered, on the tube surface within h
  Plane plane;
  double grid_spacing = 0.0;
  double disk_area = 0.0;
  double near_contact_area = 0.0;
  double disk_diameter = 0.0;
  Vec3 tip;
  double cone_angle = 0.0;  // radians, in [0, pi]
  Vec3 passage;             // where the long arc crosses the disk
  std::string limitation = "disk restricted to a plane section";
};

/// Index interval [begin, end] on the curve, wrapping on closed curves.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool contains(std::size_t i, std::size_t n) const;
};

struct ApertureOptions {
  double max_window = 0.0;  // half-width; 0: twelve tube radii, capped by the curve diameter
};

/// The bounded region of `plane` that the tube around the rest of the curve
/// encloses and the long arc passes through. Throws PreconditionViolated when
/// the long arc does not cross the plane, NoAperture when no crossing lies in
/// a bounded hole.
ApertureTriple extract_aperture(const DiscreteCurve& curve, const IndexRange& long_arc, const Plane& plane,
                                const ApertureOptions& options = {});

/// Largest angle subtended at `tip` by a pair of contour points.
double cone_angle(const std::vector<Vec3>& contour, const Vec3& tip);

/// Searches the normal planes of the long arc for one that yields an
/// aperture; the smallest disk wins.
std::optional<Plane> find_aperture_plane(const DiscreteCurve& curve, const IndexRange& long_arc);

struct ApertureHint {
  IndexRange long_arc;
  Plane plane;
};

/// Scans short stretches of the curve (half-length `arc_half_length`, default
/// four tube radii) for one that threads a bounded hole of its normal plane.
/// The stretch with the smallest disk wins; nullopt when nothing threads.
std::optional<ApertureHint> find_aperture_hint(const DiscreteCurve& curve, double arc_half_length = 0.0);

struct PersistenceReport {
  double min_disk_diameter = 0.0;
  double min_near_contact_area = 0.0;
  double min_cone_angle = 0.0;
  std::size_t frames = 0;
  std::vector<std::size_t> lost_frames;  // no aperture found; never folded into the minima
  std::vector<ApertureTriple> apertures;  // one per frame that kept its aperture
};

/// Extracts the aperture in every frame, re-fitting the plane locally when
/// the previous one no longer works. Throws EmptyTrace on an empty trace.
PersistenceReport trace_diagnostics(const IsotopyTrace& trace, const IndexRange& long_arc, const Plane& plane);

// --------------------------------------------------------------- probes

struct ProbeReport {
  double best_max_curvature = std::numeric_limits<double>::infinity();
  DiscreteCurve candidate;
  std::size_t attempts = 0;
  std::size_t feasible = 0;  // candidates meeting every constraint
  std::size_t below_bound = 0;  // feasible candidates with curvature < 0.99
};

/// Arcs inside the unit ball with both endpoints interior and one interior
/// vertex on the sphere, minimising the largest curvature.
ProbeReport probe_ball_lemma(int attempts, std::uint64_t seed);

/// Arcs inside the open unit cylinder over the xy-plane with endpoints on
/// the plane and on the unit sphere centred at (0, 0, -depth), forced to
/// reach above that sphere, minimising the largest curvature.
ProbeReport probe_cylinder_lemma(int attempts, std::uint64_t seed, double depth = 0.8660254037844386);

/// Conditions of the cylinder obstruction for a given arc.
struct CylinderCheck {
  bool inside_cylinder = false;
  bool ends_on_plane = false;
  bool ends_on_sphere = false;
  bool above_sphere = false;
  double max_curvature = 0.0;
};
CylinderCheck check_cylinder_conditions(const DiscreteCurve& arc, double depth = 0.8660254037844386,
                                        double radius = 1.0, double tol = 1e-6);

}  // namespace thickknot
