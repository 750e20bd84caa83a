#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "thickknot/constructions.hpp"

namespace thickknot {

namespace {

// Stuck polygons larger than this are more likely an artefact of the blocking
// tolerance than a genuine knot; the verdict is then left open.
constexpr std::size_t kMaxStuckVertices = 64;
constexpr int kProjections = 96;

double orient(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return dot(cross(b - a, c - a), d - a);
}

// Does segment [q0, q1] meet the closed triangle (a, b, c)? Coplanar and
// near-touching cases count as meeting, which only makes the simplification
// more cautious.
bool segment_hits_triangle(const Vec3& q0, const Vec3& q1, const Vec3& a, const Vec3& b, const Vec3& c,
                           double eps) {
  const Vec3 normal = cross(b - a, c - a);
  const double area2 = norm(normal);
  if (!(area2 > eps * eps)) {
    // Degenerate (collinear) triangle: blocked if the segment comes near it.
    return segment_distance(q0, q1, a, c) <= eps || segment_distance(q0, q1, a, b) <= eps ||
           segment_distance(q0, q1, b, c) <= eps;
  }
  const Vec3 unit = normal / area2;
  const double s0 = dot(q0 - a, unit), s1 = dot(q1 - a, unit);
  if ((s0 > eps && s1 > eps) || (s0 < -eps && s1 < -eps)) return false;
  auto inside = [&](const Vec3& x) {
    const double wa = dot(cross(c - b, x - b), unit);
    const double wb = dot(cross(a - c, x - c), unit);
    const double wc = dot(cross(b - a, x - a), unit);
    const double tol = eps * (norm(b - a) + norm(c - b) + norm(a - c));
    return wa >= -tol && wb >= -tol && wc >= -tol;
  };
  if (std::abs(s0) <= eps && std::abs(s1) <= eps) {
    // Coplanar: hits if either endpoint is inside or it crosses an edge.
    if (inside(q0) || inside(q1)) return true;
    return segment_distance(q0, q1, a, b) <= eps || segment_distance(q0, q1, b, c) <= eps ||
           segment_distance(q0, q1, c, a) <= eps;
  }
  const double t = s0 / (s0 - s1);
  return inside(lerp(q0, q1, std::clamp(t, 0.0, 1.0)));
}

// Removes vertices whose corner triangle no other edge passes through, until
// nothing more can go. Each removal is an isotopy of the polygon.
std::vector<Vec3> eliminate(std::vector<Vec3> poly, std::uint64_t seed) {
  double scale = 0.0;
  for (const auto& p : poly) scale = std::max(scale, norm(p - poly.front()));
  const double eps = 1e-10 * std::max(scale, 1.0);
  std::mt19937_64 rng(seed);
  bool removed = true;
  while (removed && poly.size() > 3) {
    removed = false;
    std::vector<std::size_t> order(poly.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> gone(poly.size(), false);
    // Linked list over surviving vertices so removals inside a pass are cheap.
    std::vector<std::size_t> prev(poly.size()), next(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
      prev[i] = (i + poly.size() - 1) % poly.size();
      next[i] = (i + 1) % poly.size();
    }
    std::size_t remaining = poly.size();
    for (std::size_t i : order) {
      if (remaining <= 3) break;
      const std::size_t a = prev[i], b = next[i];
      const Vec3 &pa = poly[a], &pi = poly[i], &pb = poly[b];
      bool blocked = false;
      for (std::size_t j = next[b]; j != a && !blocked; j = next[j]) {
        // Edge (j, next[j]); the edges touching a or b share a vertex with
        // the triangle and only block when they fold into its plane.
        const std::size_t k = next[j];
        if (j == b || k == a) {
          const Vec3& other = j == b ? poly[k] : poly[j];
          if (std::abs(orient(pa, pi, pb, other)) <= eps * norm(cross(pi - pa, pb - pa))) {
            blocked = segment_hits_triangle(lerp(j == b ? pb : pa, other, 1e-6), other, pa, pi, pb, eps);
          }
          continue;
        }
        blocked = segment_hits_triangle(poly[j], poly[k], pa, pi, pb, eps);
      }
      if (blocked) continue;
      gone[i] = true;
      next[a] = b;
      prev[b] = a;
      --remaining;
      removed = true;
    }
    std::vector<Vec3> kept;
    kept.reserve(remaining);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (!gone[i]) kept.push_back(poly[i]);
    }
    poly = std::move(kept);
  }
  return poly;
}

bool segments_cross_2d(double ax, double ay, double bx, double by, double cx, double cy, double dx, double dy) {
  auto side = [](double px, double py, double qx, double qy, double rx, double ry) {
    return (qx - px) * (ry - py) - (qy - py) * (rx - px);
  };
  const double d1 = side(cx, cy, dx, dy, ax, ay), d2 = side(cx, cy, dx, dy, bx, by);
  const double d3 = side(ax, ay, bx, by, cx, cy), d4 = side(ax, ay, bx, by, dx, dy);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

std::size_t crossings(const std::vector<Vec3>& poly, const Vec3& direction) {
  Vec3 u = std::abs(direction.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  u = normalized(u - direction * dot(u, direction));
  const Vec3 v = cross(direction, u);
  const std::size_t m = poly.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = dot(poly[i], u);
    y[i] = dot(poly[i], v);
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      const std::size_t i1 = i + 1, j1 = (j + 1) % m;
      if (segments_cross_2d(x[i], y[i], x[i1], y[i1], x[j], y[j], x[j1], y[j1])) ++count;
    }
  }
  return count;
}

}  // namespace

std::string_view to_string(UnknotVerdict verdict) {
  switch (verdict) {
    case UnknotVerdict::Unknotted: return "unknotted";
    case UnknotVerdict::Nontrivial: return "nontrivial";
    case UnknotVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

UnknotReport unconstrained_unknot_check(const DiscreteCurve& curve, std::uint64_t seed) {
  UnknotReport report;
  if (!curve.closed || curve.size() < 3) return report;
  const auto poly = eliminate(curve.points, seed);
  report.remaining_vertices = poly.size();
  if (poly.size() <= 3) {
    report.verdict = UnknotVerdict::Unknotted;
    return report;
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss;
  report.min_crossings = std::numeric_limits<std::size_t>::max();
  for (int k = 0; k < kProjections; ++k) {
    const Vec3 d = normalized(Vec3{gauss(rng), gauss(rng), gauss(rng)});
    report.min_crossings = std::min(report.min_crossings, crossings(poly, d));
  }
  // Every diagram with fewer than three crossings is an unknot diagram.
  if (report.min_crossings < 3) {
    report.verdict = UnknotVerdict::Unknotted;
  } else if (poly.size() <= kMaxStuckVertices) {
    report.verdict = UnknotVerdict::Nontrivial;
  }
  return report;
}

}  // namespace thickknot
