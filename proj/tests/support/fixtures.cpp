#include "fixtures.hpp"

#include <cmath>
#include <cstdint>

namespace fixtures {

using thickknot::kPi;

DiscreteCurve circle(double radius, std::size_t n, double tube_radius, Vec3 center) {
  DiscreteCurve c;
  c.closed = true;
  c.tube_radius = tube_radius;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    c.points.push_back(center + Vec3{radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  return c;
}

DiscreteCurve segment(const Vec3& a, const Vec3& b, std::size_t n) {
  DiscreteCurve c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back(thickknot::lerp(a, b, static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  return c;
}

DiscreteCurve stadium(double straight, double h, double tube_radius) {
  const double total = 2.0 * straight + 2.0 * kPi;
  const auto n = static_cast<std::size_t>(std::round(total / h));
  DiscreteCurve c;
  c.closed = true;
  c.tube_radius = tube_radius;
  for (std::size_t i = 0; i < n; ++i) {
    double s = total * static_cast<double>(i) / static_cast<double>(n);
    // Bottom straight, right semicircle, top straight, left semicircle.
    if (s < straight) {
      c.points.push_back({s, -1.0, 0.0});
    } else if ((s -= straight) < kPi) {
      c.points.push_back({straight + std::sin(s), -std::cos(s), 0.0});
    } else if ((s -= kPi) < straight) {
      c.points.push_back({straight - s, 1.0, 0.0});
    } else {
      s -= straight;
      c.points.push_back({-std::sin(s), std::cos(s), 0.0});
    }
  }
  return c;
}

DiscreteCurve polyline(const std::vector<Vec3>& waypoints, bool closed, double h, double tube_radius) {
  DiscreteCurve raw{waypoints, closed, tube_radius};
  const double len = thickknot::length(raw);
  const auto n = static_cast<std::size_t>(std::round(len / h)) + (closed ? 0 : 1);
  return thickknot::resample(raw, n);
}

ThreadedCoil threaded_coil(double coil_radius, double pitch, double turns, double h, double tube_radius) {
  const double rise = pitch * turns;
  const double bottom = -0.5 * rise - 1.5;
  std::vector<Vec3> pts{{0, 0, 3}, {0, 0, bottom}, {coil_radius, 0, bottom}};
  const int steps = static_cast<int>(std::ceil(turns * 400));
  for (int k = 0; k <= steps; ++k) {
    const double t = 2.0 * kPi * turns * static_cast<double>(k) / steps;
    pts.push_back({coil_radius * std::cos(t), coil_radius * std::sin(t), -0.5 * rise + pitch * t / (2.0 * kPi)});
  }
  ThreadedCoil out;
  out.curve = polyline(pts, false, h, tube_radius);
  while (out.strand_end + 1 < out.curve.size() && std::hypot(out.curve.points[out.strand_end + 1].x,
                                                             out.curve.points[out.strand_end + 1].y) < 1e-9) {
    ++out.strand_end;
  }
  return out;
}

DiscreteCurve clasp(double h) {
  std::vector<Vec3> pts;
  const int arc_steps = 200;
  // Hook A, t from pi to 0: arches over the xz-plane from (-1,0,0) to (1,0,0).
  pts.push_back({-1, 0, -3});
  for (int k = 0; k <= arc_steps; ++k) {
    const double t = kPi * (1.0 - static_cast<double>(k) / arc_steps);
    pts.push_back({std::cos(t), 0.0, std::sin(t)});
  }
  pts.push_back({1, 0, -3});
  pts.push_back({1, 0, -6});
  pts.push_back({6, 6, -6});
  pts.push_back({6, 6, 7});
  pts.push_back({0, 1, 7});
  // Hook B hangs in the yz-plane from (0,1,1) through (0,0,0) to (0,-1,1).
  for (int k = 0; k <= arc_steps; ++k) {
    const double u = kPi * static_cast<double>(k) / arc_steps;
    pts.push_back({0.0, std::cos(u), 1.0 - std::sin(u)});
  }
  pts.push_back({0, -1, 7});
  pts.push_back({-6, -6, 7});
  pts.push_back({-6, -6, -6});
  pts.push_back({-1, 0, -6});
  return polyline(pts, true, h, 0.5);
}

DiscreteCurve trefoil(double scale, std::size_t n) {
  DiscreteCurve c;
  c.closed = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    c.points.push_back(Vec3{std::sin(t) + 2 * std::sin(2 * t), std::cos(t) - 2 * std::cos(2 * t),
                            -std::sin(3 * t)} * scale);
  }
  return c;
}

CurveBundle parallel_strands(double gap, double height, std::size_t n) {
  CurveBundle b;
  b.components.push_back(segment({-gap / 2, 0, 0}, {-gap / 2, 0, height}, n));
  b.components.push_back(segment({gap / 2, 0, 0}, {gap / 2, 0, height}, n));
  return b;
}

DiscreteCurve peanut(std::size_t n) {
  DiscreteCurve c;
  c.closed = true;
  for (std::size_t i = 0; i < 4 * n; ++i) {
    const double t = 2 * kPi * static_cast<double>(i) / static_cast<double>(4 * n);
    const double r = 3.0 + 1.2 * std::cos(2 * t);
    c.points.push_back({r * std::cos(t), r * std::sin(t), 0.0});
  }
  return thickknot::resample(c, n);
}

std::vector<DiscreteCurve> corpus() {
  using thickknot::perturb;
  using thickknot::resample;
  std::vector<DiscreteCurve> out;
  for (const double r : {0.4, 0.7, 1.0, 1.5, 2.5}) {
    for (const std::size_t n : {128, 300}) out.push_back(circle(r, n));
  }
  for (const double amp : {0.02, 0.05, 0.1}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) out.push_back(perturb(circle(1.5, 300), amp, seed));
  }
  for (const double scale : {1.0, 1.5, 2.0, 3.0}) {
    for (const std::size_t n : {500, 800}) out.push_back(resample(trefoil(scale, 600), n));
  }
  for (std::uint64_t seed = 0; seed < 6; ++seed) out.push_back(perturb(resample(trefoil(2.0, 600), 600), 0.05, seed));
  for (const double straight : {1.0, 3.0, 5.0}) {
    for (const double h : {0.05, 0.1}) out.push_back(stadium(straight, h));
  }
  for (std::uint64_t seed = 0; seed < 4; ++seed) out.push_back(perturb(stadium(3.0, 0.05), 0.03, seed));
  out.push_back(peanut(300));
  out.push_back(peanut(600));
  out.push_back(clasp(0.1));
  out.push_back(clasp(0.05));
  return out;
}

}  // namespace fixtures
