#pragma once

// Test-only curve generators with known geometry.

#include <cstddef>
#include <vector>

#include "thickknot/curve.hpp"

namespace fixtures {

using thickknot::CurveBundle;
using thickknot::DiscreteCurve;
using thickknot::Vec3;

/// Regular n-gon inscribed in a circle of the given radius in the xy-plane.
DiscreteCurve circle(double radius, std::size_t n, double tube_radius = 0.0, Vec3 center = {});

/// Straight open segment with n uniformly spaced points.
DiscreteCurve segment(const Vec3& a, const Vec3& b, std::size_t n);

/// Two unit semicircles joined by straights of length `straight`, closed,
/// sampled at spacing close to h. The waist (distance between straights) is 2.
DiscreteCurve stadium(double straight, double h, double tube_radius = 0.0);

/// Closed curve made of two interlocked unit semicircular hooks whose
/// closest approach is 1, joined by far-away connectors.
DiscreteCurve clasp(double h);

/// Closed trefoil (sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t) * scale.
DiscreteCurve trefoil(double scale, std::size_t n);

/// Two parallel straight strands along +z at separation `gap`.
CurveBundle parallel_strands(double gap, double height, std::size_t n);

/// Open curve: a strand down the z-axis from z = 3, then out below and up
/// into a helix of `turns` turns around the axis centred on z = 0. The plane
/// z = 0 cuts the helix tube in a closed band around a hole the strand
/// threads. `strand_end` is the last vertex of the axial strand.
struct ThreadedCoil {
  DiscreteCurve curve;
  std::size_t strand_end = 0;
};
ThreadedCoil threaded_coil(double coil_radius, double pitch, double turns, double h, double tube_radius);

/// Two-lobed planar curve r = 3 + 1.2 cos(2 theta), resampled to n points.
/// The waist chord across the y-axis is 3.6.
DiscreteCurve peanut(std::size_t n);

/// Fifty closed curves of mixed shape and resolution: circles, stadiums,
/// peanuts, clasps, trefoils and perturbed copies.
std::vector<DiscreteCurve> corpus();

/// Polyline through the waypoints, resampled at spacing close to h.
DiscreteCurve polyline(const std::vector<Vec3>& waypoints, bool closed, double h, double tube_radius = 0.0);

}  // namespace fixtures
