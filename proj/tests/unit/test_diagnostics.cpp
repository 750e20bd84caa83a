#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "thickknot/constructions.hpp"
#include "thickknot/diagnostics.hpp"
#include "thickknot/errors.hpp"
#include "thickknot/thickness.hpp"

using namespace thickknot;

namespace {

const ArcBall kUnitBall{{0, 0, 0}, {0, 0, 1}, 1.0};

DiscreteCurve great_circle_arc(double from, double to, std::size_t n) {
  DiscreteCurve c;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
    c.points.push_back({std::cos(t), 0.0, std::sin(t)});
  }
  return c;
}

template <class F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

TraceFrame frame_of(const DiscreteCurve& c, int iteration) {
  return {c, geometric_report(c), iteration};
}

}  // namespace

TEST_CASE("arc classification") {
  const auto on_sphere = classify_arc(great_circle_arc(0.2, 1.4, 200), kUnitBall);
  CHECK(on_sphere.kind == ArcKind::Short);
  CHECK(on_sphere.on_boundary);

  const auto chord = fixtures::segment({std::cos(0.3), 0, std::sin(0.3)}, {-std::cos(0.3), 0, std::sin(0.3)}, 101);
  const auto inside = classify_arc(chord, kUnitBall);
  CHECK(inside.kind == ArcKind::Short);
  CHECK(inside.interior_inside);

  const double a = 0.5;
  const auto over = fixtures::polyline({{std::sin(a), 0, std::cos(a)}, {0, 0, 1.5}, {-std::sin(a), 0, std::cos(a)}},
                                       false, 0.01);
  const auto high = classify_arc(over, kUnitBall);
  CHECK(high.kind == ArcKind::Long);
  REQUIRE(high.above_vertex.has_value());
  CHECK(kUnitBall.height_above_sphere(over.points[*high.above_vertex]) > 0.0);
  CHECK(high.max_height_above == doctest::Approx(0.5).epsilon(0.02));

  // Leaves the ball sideways, never over the cap: neither kind.
  const auto aside = fixtures::polyline({{1, 0, 0}, {1.5, 0, -0.2}, {0, 0, -1}}, false, 0.01);
  CHECK(classify_arc(aside, kUnitBall).kind == ArcKind::Neither);

  auto off = great_circle_arc(0.2, 1.4, 50);
  off.points.front() = off.points.front() * 1.01;
  CHECK(error_of([&] { classify_arc(off, kUnitBall); }) == ErrorCode::PreconditionViolated);
  CHECK(to_string(ArcKind::Long) == "long");
}

TEST_CASE("ball for an arc puts both endpoints on the sphere") {
  const auto over = fixtures::polyline({{-0.7, 0, 0}, {0, 0.2, 1.0}, {0.7, 0, 0.1}}, false, 0.01);
  const auto ball = ball_for_arc(over);
  CHECK(ball.boundary_gap(over.points.front()) <= 1e-9);
  CHECK(ball.boundary_gap(over.points.back()) <= 1e-9);
  CHECK(dot(ball.up, Vec3{0, 0.2, 1.0} - ball.center) > 0.0);
  const auto far = fixtures::segment({0, 0, 0}, {3, 0, 0}, 31);
  CHECK_THROWS_AS(ball_for_arc(far), Error);
}

TEST_CASE("generated long arcs are wide and kinds are exclusive") {
  std::size_t longs = 0, returned = 0;
  for (std::uint64_t seed = 0; seed < 1500; ++seed) {
    const auto g = random_arc_from_sphere(kUnitBall, seed);
    CHECK(max_curvature(g.arc) <= 1.0 + 1e-6);
    if (!g.returned) continue;
    ++returned;
    CHECK(kUnitBall.boundary_gap(g.arc.points.front()) <= 1e-9);
    CHECK(kUnitBall.boundary_gap(g.arc.points.back()) <= 1e-9);
    ArcClass c;
    REQUIRE_NOTHROW(c = classify_arc(g.arc, kUnitBall));
    if (c.kind == ArcKind::Long) {
      ++longs;
      CHECK(diameter(g.arc) >= 1.98);
      CHECK_FALSE(c.interior_inside);
      CHECK_FALSE(c.on_boundary);
    }
  }
  CHECK(returned > 100);
  CHECK(longs > 5);
}

TEST_CASE("a circle has no aperture") {
  const auto ring = round_circle(5.0, 400, 0.5);
  const auto t = vertex_tangents(ring);
  const Plane plane{ring.points[10], t[10]};
  CHECK(error_of([&] { extract_aperture(ring, {0, 20}, plane); }) == ErrorCode::NoAperture);
  // The long arc must actually cross the plane.
  const Plane elsewhere{{0, 0, 3}, {0, 0, 1}};
  CHECK(error_of([&] { extract_aperture(ring, {0, 20}, elsewhere); }) == ErrorCode::PreconditionViolated);
  CHECK_FALSE(find_aperture_hint(ring).has_value());
}

TEST_CASE("threaded coil aperture matches a Monte-Carlo count") {
  for (const auto& [radius, pitch, turns] : {std::tuple{4.0, 0.8, 5.0}, std::tuple{2.5, 0.5, 4.0}}) {
    CAPTURE(radius);
    const auto coil = fixtures::threaded_coil(radius, pitch, turns, 0.1, 0.5);
    const auto ap = extract_aperture(coil.curve, {0, coil.strand_end}, Plane{{0, 0, 0}, {0, 0, 1}});
    const double mc = oracles::threaded_coil_near_contact(coil.curve, coil.strand_end, radius, 200000);
    CHECK(std::abs(ap.near_contact_area - mc) <= 0.1 * mc);
    // The hole is roughly a disk of radius coil_radius - r.
    CHECK(ap.disk_diameter == doctest::Approx(2.0 * (radius - 0.5)).epsilon(0.1));
    CHECK(ap.disk_area >= ap.near_contact_area - 1e-12);
    CHECK(ap.cone_angle > 0.0);
    CHECK(ap.cone_angle <= kPi);
    CHECK(std::abs(ap.passage.z) <= 1e-9);
    const TubeDistance tube(coil.curve);
    for (std::size_t i = 0; i < ap.contour.size(); i += 7) {
      CHECK(std::abs(ap.contour[i].z) <= 1e-9);
      CHECK(std::abs(tube.centerline_distance(ap.contour[i]) - 0.5) <= 0.1);
    }
  }
}

TEST_CASE("cone angle does not grow when the contour shrinks") {
  const auto coil = fixtures::threaded_coil(3.0, 0.6, 4.0, 0.1, 0.5);
  const auto ap = extract_aperture(coil.curve, {0, coil.strand_end}, Plane{{0, 0, 0}, {0, 0, 1}});
  CHECK(cone_angle(ap.contour, ap.tip) == doctest::Approx(ap.cone_angle));
  double last = ap.cone_angle;
  for (const double s : {0.75, 0.5, 0.25}) {
    std::vector<Vec3> shrunk;
    for (const auto& p : ap.contour) shrunk.push_back(ap.passage + (p - ap.passage) * s);
    const double a = cone_angle(shrunk, ap.tip);
    CHECK(a <= last + 1e-12);
    last = a;
  }
}

TEST_CASE("trace diagnostics") {
  const auto coil = fixtures::threaded_coil(3.0, 0.6, 4.0, 0.1, 0.5);
  const IndexRange strand{0, coil.strand_end};
  const Plane plane{{0, 0, 0}, {0, 0, 1}};
  const auto single = extract_aperture(coil.curve, strand, plane);

  IsotopyTrace still;
  for (int k = 0; k < 3; ++k) still.frames.push_back(frame_of(coil.curve, k));
  const auto rep = trace_diagnostics(still, strand, plane);
  CHECK(rep.frames == 3);
  CHECK(rep.lost_frames.empty());
  CHECK(rep.min_disk_diameter == doctest::Approx(single.disk_diameter));
  CHECK(rep.min_near_contact_area == doctest::Approx(single.near_contact_area));
  CHECK(rep.min_cone_angle == doctest::Approx(single.cone_angle));

  // Pull the strand sideways out of the coil: the aperture is lost and the
  // lost frames stay out of the minima.
  IsotopyTrace pulled;
  for (int k = 0; k <= 4; ++k) {
    auto c = coil.curve;
    const double dx = 5.0 * k / 4.0;
    for (std::size_t i = 0; i <= coil.strand_end; ++i) c.points[i].x += dx;
    pulled.frames.push_back(frame_of(c, k));
  }
  const auto lost = trace_diagnostics(pulled, strand, plane);
  CHECK(lost.frames == 5);
  REQUIRE_FALSE(lost.lost_frames.empty());
  CHECK(lost.lost_frames.back() == 4);
  CHECK(lost.apertures.size() + lost.lost_frames.size() == 5);
  CHECK(lost.min_near_contact_area > 0.0);

  CHECK(error_of([&] { trace_diagnostics(IsotopyTrace{}, strand, plane); }) == ErrorCode::EmptyTrace);
}

TEST_CASE("obstruction probes") {
  const auto a = probe_cylinder_lemma(3, 11);
  const auto b = probe_cylinder_lemma(3, 11);
  CHECK(a.best_max_curvature == b.best_max_curvature);
  CHECK(a.candidate.points == b.candidate.points);
  CHECK(a.attempts == 3);
  CHECK(a.best_max_curvature >= 0.99);
  CHECK(a.below_bound == 0);

  const auto ball = probe_ball_lemma(3, 5);
  CHECK(ball.best_max_curvature >= 0.99);
  CHECK(ball.below_bound == 0);
  CHECK_THROWS_AS(probe_ball_lemma(0, 0), Error);
}

TEST_CASE("cylinder conditions") {
  // Arc of radius 2 between the points where the plane meets the sphere.
  const double depth = std::sqrt(0.75), ring = 0.5;
  const double half = std::asin(ring / 2.0);
  DiscreteCurve low;
  for (int i = 0; i <= 200; ++i) {
    const double t = -half + 2.0 * half * i / 200.0;
    low.points.push_back({2.0 * std::sin(t), 0.0, 2.0 * std::cos(t) - 2.0 * std::cos(half)});
  }
  const auto c = check_cylinder_conditions(low, depth);
  CHECK(c.inside_cylinder);
  CHECK(c.ends_on_plane);
  CHECK(c.ends_on_sphere);
  CHECK_FALSE(c.above_sphere);
  CHECK(c.max_curvature == doctest::Approx(0.5).epsilon(1e-3));
}
