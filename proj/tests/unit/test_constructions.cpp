#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "thickknot/constructions.hpp"
#include "thickknot/errors.hpp"
#include "thickknot/thickness.hpp"

using namespace thickknot;

TEST_CASE("round circle") {
  const auto unit = round_circle(1.0, 512);
  CHECK(unit.closed);
  CHECK(max_curvature(unit) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(thickness(unit) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(max_curvature(round_circle(2.0, 512)) == doctest::Approx(0.5).epsilon(1e-3));
  // A coarse octagon still estimates the curvature to a few percent.
  CHECK(std::abs(max_curvature(round_circle(1.0, 8)) - 1.0) <= 0.05);
  CHECK_THROWS_AS(round_circle(1.0, 2), Error);
}

TEST_CASE("open overhand sits in the slab with vertical ends") {
  const double gap = 12.0;
  const auto k = open_overhand(gap);
  REQUIRE_FALSE(k.closed);
  CHECK(norm(k.points.front()) <= 1e-9);
  CHECK(norm(k.points.back() - Vec3{0.0, 0.0, gap}) <= 1e-9);
  const auto t = vertex_tangents(k);
  CHECK(norm(t.front() - Vec3{0.0, 0.0, 1.0}) <= 1e-6);
  CHECK(norm(t.back() - Vec3{0.0, 0.0, 1.0}) <= 1e-6);
  for (const auto& p : k.points) {
    CHECK(p.z >= -1e-9);
    CHECK(p.z <= gap + 1e-9);
  }
  CHECK(max_curvature(k) <= 1.0 + kCurvatureSlack);
  CHECK(unconstrained_unknot_check(close_far(k)).verdict == UnknotVerdict::Nontrivial);
}

TEST_CASE("doubled straight core gives parallel lines") {
  const auto core = fixtures::segment({0, 0, 0}, {0, 0, 6}, 61);
  const auto pair = doubled_core(core, 0.5);
  REQUIRE(pair.components.size() == 2);
  const auto& a = pair.components[0];
  const auto& b = pair.components[1];
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(norm(a.points[i] - b.points[i]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(dot(a.points[i] - b.points[i], Vec3{0, 0, 1})) <= 1e-9);
  }
  CHECK(max_curvature(a) <= 1e-9);
  CHECK(max_curvature(b) <= 1e-9);
}

TEST_CASE("doubled circular core follows the offset law") {
  for (const double rho : {1.5, 2.0, 3.0}) {
    CAPTURE(rho);
    const auto core = round_circle(rho, 720);
    // At the first vertex (rho, 0, 0) the inward normal is -x; the frame of
    // a planar circle keeps it in the plane.
    const auto pair = doubled_core(core, 0.5, true, kCurvatureSlack, Vec3{-1.0, 0.0, 0.0});
    REQUIRE(pair.components.size() == 2);
    std::vector<double> radii;
    for (const auto& c : pair.components) {
      double lo = 1e9, hi = 0.0;
      for (const auto& p : c.points) {
        const double r = std::hypot(p.x, p.y);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        CHECK(std::abs(p.z) <= 1e-9);
      }
      CHECK(hi - lo <= 1e-6);
      radii.push_back(0.5 * (lo + hi));
    }
    std::sort(radii.begin(), radii.end());
    CHECK(radii[0] == doctest::Approx(rho - 0.5).epsilon(1e-6));
    CHECK(radii[1] == doctest::Approx(rho + 0.5).epsilon(1e-6));
    const double inner = std::min(max_curvature(pair.components[0]), max_curvature(pair.components[1]));
    const double outer = std::max(max_curvature(pair.components[0]), max_curvature(pair.components[1]));
    CHECK(outer == doctest::Approx(1.0 / (rho - 0.5)).epsilon(1e-3));
    CHECK(inner == doctest::Approx(1.0 / (rho + 0.5)).epsilon(1e-3));
  }
  // Left to choose, the frame stacks the strands and keeps the core's curvature.
  const auto free = doubled_core(round_circle(2.0, 720), 0.5);
  for (const auto& c : free.components) CHECK(max_curvature(c) <= 2.0 / 3.0 + 1e-3);
}

TEST_CASE("doubled core rejects offsets tighter than the bound") {
  const auto core = round_circle(1.2, 360);
  try {
    doubled_core(core, 0.5, true, kCurvatureSlack, Vec3{-1.0, 0.0, 0.0});
    FAIL("expected OffsetCurvatureViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OffsetCurvatureViolation);
  }
  CHECK_NOTHROW(doubled_core(core, 0.5, false, kCurvatureSlack, Vec3{-1.0, 0.0, 0.0}));
  CHECK_THROWS_AS(doubled_core(core, 0.0), Error);
}

TEST_CASE("segment classification") {
  const auto circle = fixtures::circle(1.0, 512);
  const auto labels = classify_segments(circle);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].kind == ShapeKind::UnitArc);

  const auto line = fixtures::segment({0, 0, 0}, {5, 0, 0}, 101);
  const auto straight = classify_segments(line);
  REQUIRE(straight.size() == 1);
  CHECK(straight[0].kind == ShapeKind::Straight);

  const auto stadium = fixtures::stadium(3.0, 0.02);
  const auto parts = classify_segments(stadium);
  REQUIRE(parts.size() == 4);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    CHECK(parts[i].kind != parts[(i + 1) % parts.size()].kind);
    CHECK((parts[i].kind == ShapeKind::UnitArc || parts[i].kind == ShapeKind::Straight));
  }
  CHECK(to_string(ShapeKind::UnitArc) != to_string(ShapeKind::Straight));
}

TEST_CASE("unconstrained unknot check") {
  CHECK(unconstrained_unknot_check(round_circle(3.0, 64)).verdict == UnknotVerdict::Unknotted);
  CHECK(unconstrained_unknot_check(fixtures::trefoil(1.0, 96)).verdict == UnknotVerdict::Nontrivial);
  const auto a = unconstrained_unknot_check(fixtures::trefoil(1.0, 96), 7);
  CHECK(a.min_crossings >= 3);
}
