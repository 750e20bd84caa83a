#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "thickknot/kernels.hpp"

using namespace thickknot;

namespace {

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("scalar and avx2 kernels agree bit for bit") {
  const kernels::Table* avx = kernels::avx2_table();
  if (avx == nullptr) {
    MESSAGE("AVX2 unavailable; only the scalar path is exercised");
    return;
  }
  const kernels::Table& ref = kernels::scalar_table();
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 257u}) {
    const auto pts = random_points(n, 7 + n);
    const auto tan = random_points(n, 99 + n);
    const PointsSoA soa(pts), tsoa(tan);
    const Vec3 q{0.3, -1.7, 2.2}, tq{0.0, 0.6, 0.8};
    for (std::size_t begin : {std::size_t{0}, n / 3}) {
      std::vector<double> a(n), b(n), a1(n), b1(n), a2(n), b2(n);
      ref.distance2_row(q, soa, begin, n, a.data());
      avx->distance2_row(q, soa, begin, n, b.data());
      ref.chord_row(q, tq, soa, tsoa, begin, n, a.data(), a1.data(), a2.data());
      avx->chord_row(q, tq, soa, tsoa, begin, n, b.data(), b1.data(), b2.data());
      for (std::size_t j = begin; j < n; ++j) {
        CHECK(same_bits(a[j], b[j]));
        CHECK(same_bits(a1[j], b1[j]));
        CHECK(same_bits(a2[j], b2[j]));
      }
      CHECK(same_bits(ref.min_distance2(q, soa, begin, n), avx->min_distance2(q, soa, begin, n)));
      CHECK(same_bits(ref.max_distance2(q, soa, begin, n), avx->max_distance2(q, soa, begin, n)));
    }
    for (bool closed : {false, true}) {
      const SegmentsSoA segs(pts, closed && n > 2);
      CHECK(same_bits(ref.min_segment_distance2(q, segs), avx->min_segment_distance2(q, segs)));
    }
  }
}

TEST_CASE("scalar kernels match direct geometry") {
  const auto pts = random_points(40, 3);
  const PointsSoA soa(pts);
  const Vec3 q{1, 2, 3};
  const auto& k = kernels::scalar_table();
  std::vector<double> d2(pts.size());
  k.distance2_row(q, soa, 0, pts.size(), d2.data());
  double lo = 1e300, hi = 0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    CHECK(d2[j] == doctest::Approx(distance2(q, pts[j])).epsilon(1e-14));
    lo = std::min(lo, d2[j]);
    hi = std::max(hi, d2[j]);
  }
  CHECK(k.min_distance2(q, soa, 0, pts.size()) == lo);
  CHECK(k.max_distance2(q, soa, 0, pts.size()) == hi);
  CHECK(k.min_distance2(q, soa, 5, 5) == std::numeric_limits<double>::infinity());
  CHECK(k.max_distance2(q, soa, 5, 5) == 0.0);

  const SegmentsSoA segs(pts, false);
  double best = 1e300;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d = point_segment_distance(q, pts[i], pts[i + 1]);
    best = std::min(best, d * d);
  }
  CHECK(k.min_segment_distance2(q, segs) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("active table is one of the two variants") {
  const auto isa = kernels::active().isa;
  CHECK((isa == kernels::Isa::Scalar || isa == kernels::Isa::Avx2));
  CHECK(kernels::to_string(kernels::Isa::Avx2) == "avx2");
}
