#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "thickknot/errors.hpp"
#include "thickknot/thickness.hpp"

using namespace thickknot;

namespace {

Vec3 rotate_point(const Vec3& p, const Vec3& axis, double angle, const Vec3& shift) {
  return rotate(p, axis, angle) + shift;
}

DiscreteCurve rigid_motion(const DiscreteCurve& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 axis = normalized(Vec3{u(rng), u(rng), u(rng)});
  const double angle = 3.0 * u(rng);
  const Vec3 shift{5 * u(rng), 5 * u(rng), 5 * u(rng)};
  DiscreteCurve out = c;
  for (auto& p : out.points) p = rotate_point(p, axis, angle, shift);
  return out;
}

}  // namespace

TEST_CASE("round circles") {
  const auto unit = fixtures::circle(1.0, 512);
  const auto pairs = doubly_critical_pairs(unit);
  REQUIRE_FALSE(pairs.empty());
  for (const auto& p : pairs) {
    CHECK(p.chord_length == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(p.orthogonality_residual <= 0.05);
    const std::size_t gap = p.index_b > p.index_a ? p.index_b - p.index_a : p.index_a - p.index_b;
    CHECK(std::min(gap, 512 - gap) >= 250);
  }
  CHECK(r2(unit) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(thickness(unit) == doctest::Approx(2.0).epsilon(1e-3));

  const auto three = fixtures::circle(3.0, 1024);
  CHECK(r2(three) == doctest::Approx(6.0).epsilon(1e-2 / 6));
  CHECK(thickness(three) == 2.0);
}

TEST_CASE("open straight segment has no doubly critical pairs") {
  const auto s = fixtures::segment({0, 0, 0}, {0, 0, 3}, 64);
  CHECK(doubly_critical_pairs(s).empty());
  CHECK(r2(s) == std::numeric_limits<double>::infinity());
}

TEST_CASE("waist of a two-lobed curve matches the brute-force oracle") {
  const auto c = fixtures::peanut(800);
  const double h = mean_segment_length(c);
  const double expected = oracles::brute_force_r2(c);
  CHECK(expected == doctest::Approx(3.6).epsilon(1e-2));
  CHECK(std::abs(r2(c) - expected) <= 2 * h);
}

TEST_CASE("clasp thickness is one") {
  const auto c = fixtures::clasp(0.05);
  const double h = mean_segment_length(c);
  const double oracle = oracles::brute_force_thickness(c);
  CHECK(oracle == doctest::Approx(1.0).epsilon(0.02));
  CHECK(thickness(c) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(thickness(c) - oracle) <= 2 * h);
}

TEST_CASE("thickness agrees with the oracle over a corpus") {
  std::vector<DiscreteCurve> corpus = {
      fixtures::circle(1.0, 300),
      fixtures::circle(0.7, 200),
      fixtures::stadium(3.0, 0.05),
      resample(fixtures::trefoil(1.5, 600), 700),
      resample(fixtures::trefoil(3.0, 600), 900),
      perturb(resample(fixtures::circle(1.5, 400), 400), 0.05, 11),
      fixtures::peanut(600),
  };
  for (const auto& c : corpus) {
    const double h = mean_segment_length(c);
    const double got = thickness(c);
    CHECK(got <= 2.0);
    CHECK(std::abs(got - oracles::brute_force_thickness(c)) <= 2 * h);
  }
}

TEST_CASE("search strategies agree") {
  const auto c = resample(fixtures::trefoil(2.0, 600), 1200);
  const auto a = doubly_critical_pairs(c, {}, PairSearch::AllPairs);
  const auto b = doubly_critical_pairs(c, {}, PairSearch::SpatialHash);
  REQUIRE(!a.empty());
  REQUIRE(!b.empty());
  CHECK(a.front().chord_length == doctest::Approx(b.front().chord_length).epsilon(1e-12));
}

TEST_CASE("rigid motion and scaling") {
  const auto c = resample(fixtures::trefoil(1.2, 600), 600);
  const double base_r2 = r2(c);
  const double base_t = thickness(c);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = rigid_motion(c, seed);
    CHECK(std::abs(r2(m) - base_r2) <= 1e-9);
    CHECK(std::abs(thickness(m) - base_t) <= 1e-9);
  }
  for (double s : {0.5, 1.7}) {
    const auto sc = scaled(c, s, {});
    CHECK(r2(sc) == doctest::Approx(s * base_r2).epsilon(1e-9));
    CHECK(thickness(sc) == doctest::Approx(std::min(2.0, s * base_r2)).epsilon(1e-9));
  }
}

TEST_CASE("reach") {
  const auto c = fixtures::circle(1.0, 2000, 0.5);
  CHECK(reach_at(c, {4, 0, 0}) == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(reach_at(c, {0, 0, 0}) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(reach_at(c, {1.5, 0, 0}) <= mean_segment_length(c));
  CHECK(reach_at(c, {1.2, 0, 0}) == 0.0);
}

TEST_CASE("membership") {
  const auto unit = fixtures::circle(1.0, 512);
  CHECK(check_membership(unit, 2.0).is_member);
  CHECK(check_membership(unit, 1.0).is_member);
  CHECK(check_membership(unit, 2.0).unknottedness == "assumed");

  const auto small = fixtures::circle(0.5, 512);
  for (double tau : {0.0, 0.5, 1.0}) {
    const auto v = check_membership(small, tau);
    CHECK_FALSE(v.is_member);
    REQUIRE_FALSE(v.reasons.empty());
    CHECK(v.reasons.front().find("curvature") != std::string::npos);
  }

  CHECK_THROWS_AS(check_membership(fixtures::segment({0, 0, 0}, {1, 0, 0}, 10), 1.0), Error);
  CHECK_THROWS_AS(check_membership(unit, 2.5), Error);
}

TEST_CASE("membership is monotone in tau") {
  std::vector<DiscreteCurve> corpus = {fixtures::circle(1.0, 256), fixtures::circle(1.4, 256),
                                       fixtures::clasp(0.1), resample(fixtures::trefoil(2.0, 400), 500)};
  for (const auto& c : corpus) {
    const auto report = geometric_report(c);
    bool previous = true;
    for (int k = 0; k <= 8; ++k) {
      const bool member = membership_from_report(report, 0.25 * k).is_member;
      if (member) CHECK(previous);
      previous = member;
    }
  }
}
