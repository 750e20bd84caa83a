#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "thickknot/errors.hpp"
#include "thickknot/sono.hpp"
#include "thickknot/thickness.hpp"

using namespace thickknot;

TEST_CASE("overlap detection") {
  const auto unit = fixtures::circle(1.0, 512);
  CHECK(detect_overlaps(unit, 2.0).empty());
  const auto fat = detect_overlaps(unit, 2.1);
  REQUIRE_FALSE(fat.empty());
  double deepest = 0.0;
  for (const auto& o : fat) deepest = std::max(deepest, o.depth);
  CHECK(deepest == doctest::Approx(0.1).epsilon(0.02));

  const auto strands = fixtures::parallel_strands(0.9, 5.0, 101);
  const auto o = detect_overlaps(strands, 1.0);
  REQUIRE_FALSE(o.empty());
  // Facing beads penetrate by 0.1; diagonal neighbours by less.
  const double h = 0.05;
  double deepest_pair = 0.0;
  for (const auto& p : o) {
    CHECK(p.depth <= 0.1 + h);
    deepest_pair = std::max(deepest_pair, p.depth);
  }
  CHECK(std::abs(deepest_pair - 0.1) <= h);
}

TEST_CASE("overlap removal") {
  const auto unit = fixtures::circle(1.0, 256);
  CHECK(remove_overlaps(unit, 2.0) == unit);

  const auto strands = fixtures::parallel_strands(0.9, 5.0, 101);
  const auto r = remove_overlaps(strands, 1.0);
  CHECK(r.resolved);
  double closest = 1e9;
  for (const auto& p : r.bundle.components[0].points) {
    for (const auto& q : r.bundle.components[1].points) closest = std::min(closest, distance(p, q));
  }
  CHECK(closest >= 0.999);

  const auto fused = fixtures::parallel_strands(0.1, 5.0, 101);
  const auto f = remove_overlaps(fused, 1.0);
  const double depth = f.max_penetration;
  CHECK((f.resolved ? depth <= 1e-3 : depth > 1e-3));
}

TEST_CASE("curvature control") {
  const auto gentle = fixtures::circle(1.25, 256);
  CHECK(control_curvature(gentle) == gentle);
  const auto unit = fixtures::circle(1.0, 512);
  const auto u2 = control_curvature(unit, 1.0 + 0.25 * kCurvatureSlack);
  for (std::size_t i = 0; i < unit.size(); ++i) CHECK(distance(u2.points[i], unit.points[i]) < 1e-9);

  // Hairpin: two straights joined by a half circle of radius 1/2.
  std::vector<Vec3> pts;
  for (int i = 0; i <= 40; ++i) pts.push_back({-0.5, 2.0 - 0.05 * i, 0});
  for (int i = 1; i < 31; ++i) {
    const double a = kPi * i / 31.0;
    pts.push_back({-0.5 * std::cos(a), -0.5 * std::sin(a), 0});
  }
  for (int i = 0; i <= 40; ++i) pts.push_back({0.5, 0.05 * i, 0});
  DiscreteCurve hairpin = resample(DiscreteCurve{pts, false, 0.0}, 120);
  REQUIRE(max_curvature(hairpin) > 1.8);
  const auto fixed = control_curvature(hairpin, 1.0, 5000);
  CHECK(max_curvature(fixed) <= 1.0 + kCurvatureSlack);
}

TEST_CASE("shrink step") {
  const auto unit = fixtures::circle(1.0, 128);
  CHECK(shrink_step(unit, 1.0) == unit);
  const auto s = shrink_step(unit, 0.999);
  for (const auto& p : s.points) CHECK(norm(p) == doctest::Approx(0.999).epsilon(1e-12));
  CHECK(length(s) == doctest::Approx(0.999 * length(unit)).epsilon(1e-12));
}

TEST_CASE("round circle is a fixed point") {
  const auto unit = fixtures::circle(1.0, 256);
  TightenConfig cfg;
  cfg.max_iters = 3000;
  const auto r = tighten(unit, cfg);
  CHECK(std::abs(length(r.final_curve) - length(unit)) / length(unit) < 1e-3);
  CHECK(r.report.max_curvature <= 1.0 + kCurvatureSlack);
  CHECK(r.report.thickness >= 2.0 - 0.02);
}

TEST_CASE("perturbed circle tightens to the round circle") {
  const auto start = perturb(fixtures::circle(1.0, 256), 0.1, 3);
  TightenConfig cfg;
  cfg.max_iters = 6000;
  const auto r = tighten(start, cfg);
  MESSAGE("iterations " << r.iterations << " length " << length(r.final_curve) << " converged " << r.converged);
  CHECK(length(r.final_curve) == doctest::Approx(2 * kPi).epsilon(0.01));
  CHECK(r.report.max_curvature <= 1.0 + kCurvatureSlack);
  CHECK(r.report.thickness >= 2.0 - 0.02);
}
