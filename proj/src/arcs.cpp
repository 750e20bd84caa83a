#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "thickknot/diagnostics.hpp"
#include "thickknot/errors.hpp"

namespace thickknot {

double ArcBall::height_above_sphere(const Vec3& p) const {
  const Vec3 d = p - center;
  const double a = dot(d, up);
  const double rho = norm(d - up * a);
  if (!(rho < radius)) return -std::numeric_limits<double>::infinity();
  return a - std::sqrt(radius * radius - rho * rho);
}

ArcBall ball_for_arc(const DiscreteCurve& arc) {
  if (arc.size() < 2) throw Error(ErrorCode::DegenerateCurve, "arc needs at least two points");
  const Vec3 a = arc.points.front(), b = arc.points.back();
  const double chord = distance(a, b);
  if (chord > 2.0) throw Error(ErrorCode::PreconditionViolated, "arc endpoints more than 2 apart");
  const Vec3 mid = (a + b) * 0.5;
  const Vec3 along = chord > 0.0 ? (b - a) / chord : Vec3{};
  Vec3 apex = arc.points.front();
  double far = -1.0;
  for (const auto& p : arc.points) {
    const Vec3 off = (p - mid) - along * dot(p - mid, along);
    if (norm(off) > far) {
      far = norm(off);
      apex = p;
    }
  }
  Vec3 up = (apex - mid) - along * dot(apex - mid, along);
  up = norm(up) > 1e-12 ? normalized(up) : any_orthogonal(chord > 0.0 ? along : Vec3{0, 0, 1});
  ArcBall ball;
  ball.up = up;
  ball.center = mid - up * std::sqrt(std::max(0.0, 1.0 - 0.25 * chord * chord));
  return ball;
}

std::string_view to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::Short: return "short";
    case ArcKind::Long: return "long";
    case ArcKind::Neither: return "neither";
  }
  return "neither";
}

ArcClass classify_arc(const DiscreteCurve& arc, const ArcBall& ball) {
  if (arc.size() < 2) throw Error(ErrorCode::DegenerateCurve, "arc needs at least two points");
  constexpr double kEndTol = 1e-6;
  if (ball.boundary_gap(arc.points.front()) > kEndTol || ball.boundary_gap(arc.points.back()) > kEndTol) {
    throw Error(ErrorCode::PreconditionViolated, "arc endpoints are not on the sphere");
  }
  const double h = mean_segment_length(arc);
  ArcClass out;
  out.on_boundary = true;
  out.interior_inside = true;
  for (std::size_t i = 0; i < arc.size(); ++i) {
    const Vec3& p = arc.points[i];
    if (ball.boundary_gap(p) > h) out.on_boundary = false;
    if (i > 0 && i + 1 < arc.size() && !ball.inside(p)) out.interior_inside = false;
    const double above = ball.height_above_sphere(p);
    if (above > out.max_height_above) out.max_height_above = above;
    // Points within h of the sphere are not counted as above it, so an arc
    // lying on the sphere cannot also be long.
    if (above > h && !out.above_vertex) out.above_vertex = i;
  }
  const bool is_short = out.on_boundary || out.interior_inside;
  const bool is_long = out.above_vertex.has_value();
  if (is_short && is_long) throw Error(ErrorCode::PreconditionViolated, "arc classified both short and long");
  out.kind = is_short ? ArcKind::Short : (is_long ? ArcKind::Long : ArcKind::Neither);
  return out;
}

GeneratedArc random_arc_from_sphere(const ArcBall& ball, std::uint64_t seed, double max_curvature, double step,
                                    double max_length) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  auto random_dir = [&] { return normalized(Vec3{gauss(rng), gauss(rng), gauss(rng)}); };

  // Start on the upper half of the sphere, heading out or in at random.
  Vec3 radial = random_dir();
  if (dot(radial, ball.up) < 0.0) radial = radial - ball.up * (2.0 * dot(radial, ball.up));
  Vec3 t = random_dir();
  const double outward = dot(t, radial);
  if ((unit(rng) < 0.5) != (outward > 0.0)) t = t - radial * (2.0 * outward);
  Vec3 n = any_orthogonal(t);
  n = rotate(n, t, 2.0 * kPi * unit(rng));

  GeneratedArc out;
  out.arc.tube_radius = 0.0;
  out.arc.closed = false;
  Vec3 p = ball.center + radial * ball.radius;
  out.arc.points.push_back(p);

  double kappa = 0.0, torsion = 0.0, left = 0.0, travelled = 0.0;
  while (travelled < max_length) {
    if (left <= 0.0) {
      kappa = max_curvature * unit(rng);
      torsion = 2.0 * unit(rng) - 1.0;
      left = 0.2 + 1.8 * unit(rng);
    }
    // Exact circle step in the osculating plane, then twist the frame.
    const Vec3 b = cross(t, n);
    const Vec3 t0 = t, n0 = n;
    auto along = [&](double sigma) {
      if (kappa <= 0.0) return p + t0 * sigma;
      const double phi = kappa * sigma;
      return p + (t0 * std::sin(phi) + n0 * (1.0 - std::cos(phi))) / kappa;
    };
    const Vec3 q = along(step);
    t = rotate(t, b, kappa * step);
    n = rotate(rotate(n, b, kappa * step), t, torsion * step);
    travelled += step;
    left -= step;
    auto gap = [&](const Vec3& x) { return distance(x, ball.center) - ball.radius; };
    const bool outside_p = gap(p) > 0.0;
    if (out.arc.size() > 2 && outside_p != (gap(q) > 0.0)) {
      // Land on the sphere along the same circle, so the last vertex turns
      // no more sharply than the rest.
      double lo = 0.0, hi = step;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((gap(along(mid)) > 0.0) == outside_p ? lo : hi) = mid;
      }
      const Vec3 end = along(hi);
      if (hi < 1e-6 * step) out.arc.points.back() = end;
      else out.arc.points.push_back(end);
      out.returned = true;
      return out;
    }
    p = q;
    out.arc.points.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------- probes

namespace {

constexpr int kRestarts = 5;
constexpr std::size_t kProbeVertices = 16;
constexpr double kMinSegment = 0.02;

// Smooth stand-in for the largest curvature, so the penalty objective has a
// usable gradient.
double soft_max_curvature(const std::vector<Vec3>& p) {
  double m = 0.0;
  std::vector<double> k(p.size(), 0.0);
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const Vec3 e1 = p[i] - p[i - 1], e2 = p[i + 1] - p[i];
    const double len = 0.5 * (norm(e1) + norm(e2));
    k[i] = len > 0.0 ? 2.0 * std::sin(0.5 * angle_between(e1, e2)) / len : 1e3;
    m = std::max(m, k[i]);
  }
  constexpr double kSharp = 40.0;
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) s += std::exp(kSharp * (k[i] - m));
  return m + std::log(s) / kSharp;
}

double max_curv(const std::vector<Vec3>& p) {
  DiscreteCurve c;
  c.points = p;
  return max_curvature(c);
}

// Penalty continuation with backtracking gradient descent on the vertex
// coordinates; central differences are plenty at this size.
std::vector<Vec3> minimise(std::vector<Vec3> p, const std::function<double(const std::vector<Vec3>&)>& violation) {
  std::vector<Vec3> grad(p.size());
  for (double mu : {10.0, 100.0, 1e3, 1e4}) {
    auto f = [&](const std::vector<Vec3>& x) { return soft_max_curvature(x) + mu * violation(x); };
    double step = 1e-2, fx = f(p);
    for (int it = 0; it < 100; ++it) {
      constexpr double kEps = 1e-6;
      double gnorm2 = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
          double* coord = c == 0 ? &p[i].x : (c == 1 ? &p[i].y : &p[i].z);
          const double keep = *coord;
          *coord = keep + kEps;
          const double up = f(p);
          *coord = keep - kEps;
          const double down = f(p);
          *coord = keep;
          double& g = c == 0 ? grad[i].x : (c == 1 ? grad[i].y : grad[i].z);
          g = (up - down) / (2.0 * kEps);
          gnorm2 += g * g;
        }
      }
      if (!(gnorm2 > 1e-20)) break;
      const double scale = 1.0 / std::sqrt(gnorm2);
      bool moved = false;
      while (step > 1e-9) {
        std::vector<Vec3> trial = p;
        for (std::size_t i = 0; i < p.size(); ++i) trial[i] -= grad[i] * (step * scale);
        const double ft = f(trial);
        if (ft < fx) {
          p = std::move(trial);
          fx = ft;
          step *= 1.5;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }
  return p;
}

double segment_violation(const std::vector<Vec3>& p) {
  double v = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) v += std::pow(std::max(0.0, kMinSegment - distance(p[i - 1], p[i])), 2);
  return v;
}

bool segments_ok(const std::vector<Vec3>& p) {
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (!(distance(p[i - 1], p[i]) >= kMinSegment * 0.999)) return false;
  }
  return true;
}

void record(ProbeReport& report, std::vector<Vec3> p, bool feasible) {
  if (!feasible) return;
  ++report.feasible;
  const double k = max_curv(p);
  if (k < 0.99) ++report.below_bound;
  if (k < report.best_max_curvature) {
    report.best_max_curvature = k;
    report.candidate.points = std::move(p);
    report.candidate.closed = false;
  }
}

}  // namespace

ProbeReport probe_ball_lemma(int attempts, std::uint64_t seed) {
  if (attempts < 1) throw Error(ErrorCode::InvalidArgument, "attempts must be at least 1");
  constexpr double kInner = 1.0 - 1e-3;  // "strictly inside" margin for every other vertex
  ProbeReport report;
  report.attempts = static_cast<std::size_t>(attempts);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = kProbeVertices;
  for (int a = 0; a < attempts; ++a) {
    const std::size_t touch = 2 + static_cast<std::size_t>(unit(rng) * static_cast<double>(m - 4));
    auto violation = [&](const std::vector<Vec3>& p) {
      double v = segment_violation(p);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = norm(p[i]);
        v += i == touch ? (r - 1.0) * (r - 1.0) : std::pow(std::max(0.0, r - kInner), 2);
      }
      return v;
    };
    for (int restart = 0; restart < kRestarts; ++restart) {
      // Start from a circle of radius below 1 touching the sphere from inside
      // at the touch vertex; the optimiser then tries to flatten it.
      const Vec3 target = normalized(Vec3{gauss(rng), gauss(rng), gauss(rng)});
      const Vec3 side = rotate(any_orthogonal(target), target, 2.0 * kPi * unit(rng));
      const double rho = 0.6 + 0.37 * unit(rng);
      const double dphi = std::max(kMinSegment * 1.5, 0.05 + 0.1 * unit(rng)) / rho;
      std::vector<Vec3> p(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double phi = (static_cast<double>(i) - static_cast<double>(touch)) * dphi;
        p[i] = target * (1.0 - rho) + (target * std::cos(phi) + side * std::sin(phi)) * rho;
      }
      p = minimise(std::move(p), violation);
      p[touch] = normalized(p[touch]);
      bool ok = segments_ok(p);
      for (std::size_t i = 0; i < m && ok; ++i) {
        if (i != touch && !(norm(p[i]) < kInner + 1e-9)) ok = false;
      }
      record(report, std::move(p), ok);
    }
  }
  return report;
}

CylinderCheck check_cylinder_conditions(const DiscreteCurve& arc, double depth, double radius, double tol) {
  CylinderCheck c;
  if (arc.size() < 2) return c;
  const ArcBall sphere{Vec3{0, 0, -depth}, Vec3{0, 0, 1}, 1.0};
  c.inside_cylinder = true;
  for (const auto& p : arc.points) {
    if (!(std::hypot(p.x, p.y) < radius) || p.z < -tol) c.inside_cylinder = false;
    if (sphere.height_above_sphere(p) > tol) c.above_sphere = true;
  }
  const Vec3 &a = arc.points.front(), &b = arc.points.back();
  c.ends_on_plane = std::abs(a.z) <= tol && std::abs(b.z) <= tol;
  c.ends_on_sphere = sphere.boundary_gap(a) <= tol && sphere.boundary_gap(b) <= tol;
  c.max_curvature = max_curvature(arc);
  return c;
}

ProbeReport probe_cylinder_lemma(int attempts, std::uint64_t seed, double depth) {
  if (attempts < 1) throw Error(ErrorCode::InvalidArgument, "attempts must be at least 1");
  if (!(depth > 0.0 && depth < 1.0)) throw Error(ErrorCode::InvalidArgument, "sphere depth must be in (0, 1)");
  constexpr double kCylinder = 1.0 - 1e-3;
  constexpr double kAbove = 1e-3;
  const double ring = std::sqrt(1.0 - depth * depth);  // radius of the plane-sphere circle
  const ArcBall sphere{Vec3{0, 0, -depth}, Vec3{0, 0, 1}, 1.0};
  ProbeReport report;
  report.attempts = static_cast<std::size_t>(attempts);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = kProbeVertices;
  for (int a = 0; a < attempts; ++a) {
    const std::size_t apex = m / 3 + static_cast<std::size_t>(unit(rng) * static_cast<double>(m / 3));
    auto violation = [&](const std::vector<Vec3>& p) {
      double v = segment_violation(p);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double rho = std::hypot(p[i].x, p[i].y);
        v += std::pow(std::max(0.0, rho - kCylinder), 2) + std::pow(std::max(0.0, -p[i].z), 2);
      }
      // Endpoints on the circle where the plane meets the sphere.
      for (const Vec3* e : {&p.front(), &p.back()}) {
        v += e->z * e->z + std::pow(std::hypot(e->x, e->y) - ring, 2);
      }
      // Apex above the sphere; measured as a height over the cap so it stays
      // smooth outside the cylinder as well.
      const double rho = std::min(std::hypot(p[apex].x, p[apex].y), 1.0);
      const double over = p[apex].z + depth - std::sqrt(1.0 - rho * rho);
      v += std::pow(std::max(0.0, kAbove - over), 2);
      return v;
    };
    for (int restart = 0; restart < kRestarts; ++restart) {
      // A bump between two points of the ring that just clears the sphere.
      const double t0 = 2.0 * kPi * unit(rng), t1 = t0 + kPi * (0.6 + 0.4 * unit(rng));
      const Vec3 a0{ring * std::cos(t0), ring * std::sin(t0), 0.0};
      const Vec3 b0{ring * std::cos(t1), ring * std::sin(t1), 0.0};
      const double s_apex = static_cast<double>(apex) / static_cast<double>(m - 1);
      const Vec3 foot = lerp(a0, b0, s_apex);
      const double rho = std::hypot(foot.x, foot.y);
      const double height = std::sqrt(1.0 - rho * rho) - depth + 0.01 + 0.1 * unit(rng);
      std::vector<Vec3> p(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(m - 1);
        const double bump = s <= s_apex ? std::sin(0.5 * kPi * s / s_apex) : std::sin(0.5 * kPi * (1.0 - s) / (1.0 - s_apex));
        p[i] = lerp(a0, b0, s) + Vec3{0, 0, height * bump};
      }
      p = minimise(std::move(p), violation);
      // Snap the ends exactly onto the circle before checking.
      for (Vec3* e : {&p.front(), &p.back()}) {
        const double rho = std::hypot(e->x, e->y);
        *e = rho > 0.0 ? Vec3{e->x * ring / rho, e->y * ring / rho, 0.0} : Vec3{ring, 0.0, 0.0};
      }
      DiscreteCurve arc;
      arc.points = p;
      const auto check = check_cylinder_conditions(arc, depth, 1.0, 1e-6);
      const bool ok = segments_ok(p) && check.inside_cylinder && check.ends_on_plane && check.ends_on_sphere &&
                      sphere.height_above_sphere(p[apex]) > 0.0;
      record(report, std::move(p), ok);
    }
  }
  return report;
}

}  // namespace thickknot
