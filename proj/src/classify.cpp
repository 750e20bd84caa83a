#include <algorithm>
#include <cmath>
#include <optional>

#include "thickknot/constructions.hpp"

namespace thickknot {

namespace {

struct Run {
  std::size_t begin = 0;  // offset into the rotated index order
  std::size_t count = 0;
  ShapeKind kind = ShapeKind::Other;
  double residual = 0.0;
};

// Signed discrete torsion at interior vertex i from the binormals of the
// two neighbouring corners; zero where the curve is locally straight.
double torsion_at(const DiscreteCurve& c, std::size_t i, double straight) {
  const std::size_t n = c.size();
  if (!c.closed && (i < 2 || i + 2 >= n)) return 0.0;
  auto at = [&](std::ptrdiff_t k) {
    const auto sn = static_cast<std::ptrdiff_t>(n);
    return c.points[static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(i) + k) % sn + sn) % sn)];
  };
  const Vec3 e0 = at(-1) - at(-2), e1 = at(0) - at(-1), e2 = at(1) - at(0), e3 = at(2) - at(1);
  const Vec3 b0 = cross(e0, e1), b1 = cross(e2, e3);
  const double h = 0.25 * (norm(e0) + norm(e1) + norm(e2) + norm(e3));
  if (curvature_at(c, (i + n - 1) % n) < straight || curvature_at(c, (i + 1) % n) < straight) return 0.0;
  if (!(norm(b0) > 0.0 && norm(b1) > 0.0)) return 0.0;
  const double angle = angle_between(b0, b1);
  const double sign = dot(cross(b0, b1), e1 + e2) >= 0.0 ? 1.0 : -1.0;
  return sign * angle / (2.0 * h);
}

// Circle through three points: centre, radius and unit normal.
std::optional<std::tuple<Vec3, double, Vec3>> circle_through(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a;
  const Vec3 n = cross(ab, ac);
  const double n2 = norm2(n);
  if (!(n2 > 1e-24)) return std::nullopt;
  const Vec3 centre = a + (cross(n, ab) * norm2(ac) + cross(ac, n) * norm2(ab)) / (2.0 * n2);
  return std::make_tuple(centre, distance(centre, a), n / std::sqrt(n2));
}

class Classifier {
 public:
  Classifier(const DiscreteCurve& curve, const ClassifyThresholds& t) : curve_(curve), t_(t), n_(curve.size()) {}

  std::vector<SegmentLabel> run() {
    std::vector<ShapeKind> cls(n_);
    kappa_.resize(n_);
    tau_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      kappa_[i] = curvature_at(curve_, i);
      tau_[i] = torsion_at(curve_, i, t_.straight_curvature);
      cls[i] = vertex_class(i);
    }
    // Closed curves are read from the first class change so no run wraps
    // in the middle.
    start_ = 0;
    if (curve_.closed) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (cls[i] != cls[(i + n_ - 1) % n_]) {
          start_ = i;
          break;
        }
      }
    }
    std::vector<Run> runs;
    for (std::size_t k = 0; k < n_; ++k) {
      const ShapeKind kind = cls[index(k)];
      if (runs.empty() || runs.back().kind != kind) runs.push_back({k, 0, kind, 0.0});
      ++runs.back().count;
    }
    std::vector<Run> split;
    for (const auto& r : runs) {
      if (r.kind == ShapeKind::Helix) {
        split_helices(r, split);
      } else {
        split.push_back(r);
      }
    }
    runs = std::move(split);
    for (auto& r : runs) {
      r.residual = residual(r);
      if (r.kind != ShapeKind::Other && !(r.residual <= threshold(r.kind))) r.kind = ShapeKind::Other;
    }
    absorb_short(runs);

    std::vector<SegmentLabel> out;
    for (const auto& r : runs) {
      out.push_back({index(r.begin), index(r.begin + r.count - 1), r.kind, r.kind == ShapeKind::Other ? 0.0 : r.residual});
    }
    return out;
  }

 private:
  std::size_t index(std::size_t k) const { return (start_ + k) % n_; }

  // Per-vertex guess; Helix here means "curved but not a unit planar arc"
  // and is confirmed or rejected by split_helices.
  ShapeKind vertex_class(std::size_t i) const {
    if (!curve_.closed && (i == 0 || i + 1 == n_)) {
      const std::size_t j = i == 0 ? std::min<std::size_t>(1, n_ - 1) : n_ - 2;
      return kappa_[j] < t_.straight_curvature ? ShapeKind::Straight : ShapeKind::Other;
    }
    if (kappa_[i] < t_.straight_curvature) return ShapeKind::Straight;
    if (std::abs(kappa_[i] - 1.0) <= t_.relative_tolerance && std::abs(tau_[i]) <= t_.straight_curvature) {
      return ShapeKind::UnitArc;
    }
    return ShapeKind::Helix;
  }

  // Greedy windows of constant curvature and torsion inside a curved run.
  void split_helices(const Run& r, std::vector<Run>& out) const {
    std::size_t k = r.begin;
    const std::size_t stop = r.begin + r.count;
    while (k < stop) {
      std::size_t m = k + 1;
      double sum_k = kappa_[index(k)], sum_t = tau_[index(k)];
      while (m < stop) {
        const double mk = (sum_k + kappa_[index(m)]) / static_cast<double>(m - k + 1);
        const double mt = (sum_t + tau_[index(m)]) / static_cast<double>(m - k + 1);
        bool ok = true;
        for (std::size_t j = k; j <= m && ok; ++j) {
          ok = std::abs(kappa_[index(j)] - mk) <= t_.relative_tolerance * mk &&
               std::abs(tau_[index(j)] - mt) <= t_.relative_tolerance * std::max(std::abs(mt), t_.straight_curvature);
        }
        if (!ok) break;
        sum_k += kappa_[index(m)];
        sum_t += tau_[index(m)];
        ++m;
      }
      const std::size_t len = m - k;
      const ShapeKind kind = len >= t_.min_run ? ShapeKind::Helix : ShapeKind::Other;
      if (!out.empty() && out.back().kind == ShapeKind::Other && kind == ShapeKind::Other &&
          out.back().begin + out.back().count == k) {
        out.back().count += len;
      } else {
        out.push_back({k, len, kind, 0.0});
      }
      k = m;
    }
  }

  std::vector<Vec3> points(std::size_t begin, std::size_t count) const {
    std::vector<Vec3> p;
    p.reserve(count);
    for (std::size_t k = begin; k < begin + count; ++k) p.push_back(curve_.points[index(k)]);
    return p;
  }

  static double chord_span(const std::vector<Vec3>& p) {
    double len = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) len += distance(p[i - 1], p[i]);
    return len;
  }

  double threshold(ShapeKind kind) const {
    return kind == ShapeKind::Straight ? t_.straight_curvature : t_.relative_tolerance;
  }

  // Straight: the curvature of the arc with the run's worst sagitta.
  // UnitArc: deviation from the circle through the run's ends and middle,
  // measured the same way, or of that circle's curvature from 1.
  // Helix: largest relative spread of curvature or torsion.
  double residual(const Run& r) const {
    const auto p = points(r.begin, r.count);
    if (p.size() < 3 && r.kind != ShapeKind::Other) return r.kind == ShapeKind::Helix ? 1e300 : 0.0;
    const double span = chord_span(p);
    const double sagitta_scale = span > 0.0 ? 8.0 / (span * span) : 0.0;
    switch (r.kind) {
      case ShapeKind::Straight: {
        double worst = 0.0;
        for (const auto& q : p) worst = std::max(worst, point_segment_distance(q, p.front(), p.back()));
        return worst * sagitta_scale;
      }
      case ShapeKind::UnitArc: {
        const bool full = curve_.closed && r.count == n_;
        const auto fit = circle_through(p.front(), p[p.size() / 2], full ? p[p.size() / 4] : p.back());
        if (!fit) return 1e300;
        const auto& [centre, radius, normal] = *fit;
        double worst = std::abs(1.0 / radius - 1.0);
        const double scale = full ? 1.0 : sagitta_scale;
        for (const auto& q : p) {
          const double off_plane = dot(q - centre, normal);
          const double in_plane = norm((q - centre) - normal * off_plane) - radius;
          worst = std::max(worst, std::hypot(off_plane, in_plane) * scale);
        }
        return worst;
      }
      case ShapeKind::Helix: {
        double mk = 0.0, mt = 0.0;
        for (std::size_t k = r.begin; k < r.begin + r.count; ++k) {
          mk += kappa_[index(k)];
          mt += tau_[index(k)];
        }
        mk /= static_cast<double>(r.count);
        mt /= static_cast<double>(r.count);
        double worst = 0.0;
        for (std::size_t k = r.begin; k < r.begin + r.count; ++k) {
          worst = std::max(worst, std::abs(kappa_[index(k)] - mk) / mk);
          worst = std::max(worst, std::abs(tau_[index(k)] - mt) / std::max(std::abs(mt), t_.straight_curvature));
        }
        return worst;
      }
      case ShapeKind::Other: return 0.0;
    }
    return 0.0;
  }

  bool try_merge(std::vector<Run>& runs, std::size_t into, std::size_t from) const {
    Run merged = runs[into];
    merged.begin = std::min(runs[into].begin, runs[from].begin);
    merged.count = runs[into].count + runs[from].count;
    merged.residual = residual(merged);
    if (merged.kind != ShapeKind::Other && !(merged.residual <= threshold(merged.kind))) return false;
    runs[into] = merged;
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(from));
    return true;
  }

  // Short runs go into a neighbour when the neighbour still fits; runs of
  // one kind that end up adjacent are joined the same way.
  void absorb_short(std::vector<Run>& runs) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < runs.size() && !changed; ++i) {
        if (runs[i].count >= t_.min_run || runs.size() == 1) continue;
        const bool has_left = i > 0, has_right = i + 1 < runs.size();
        const bool left_first = has_left && (!has_right || runs[i - 1].count >= runs[i + 1].count);
        if (left_first && try_merge(runs, i - 1, i)) changed = true;
        else if (has_right && try_merge(runs, i + 1, i)) changed = true;
        else if (!left_first && has_left && try_merge(runs, i - 1, i)) changed = true;
        else if (runs[i].kind != ShapeKind::Other) {
          runs[i].kind = ShapeKind::Other;
          runs[i].residual = 0.0;
          changed = true;
        }
      }
      for (std::size_t i = 0; i + 1 < runs.size() && !changed; ++i) {
        if (runs[i].kind == runs[i + 1].kind && try_merge(runs, i, i + 1)) changed = true;
      }
    }
    // On a closed curve the first and last runs meet.
    if (curve_.closed && runs.size() > 1 && runs.front().kind == runs.back().kind) {
      Run merged = runs.back();
      merged.count += runs.front().count;
      merged.residual = residual(merged);
      if (merged.kind == ShapeKind::Other || merged.residual <= threshold(merged.kind)) {
        runs.back() = merged;
        runs.erase(runs.begin());
      }
    }
  }

  const DiscreteCurve& curve_;
  ClassifyThresholds t_;
  std::size_t n_;
  std::size_t start_ = 0;
  std::vector<double> kappa_, tau_;
};

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::UnitArc: return "unit_arc";
    case ShapeKind::Straight: return "straight";
    case ShapeKind::Helix: return "helix";
    case ShapeKind::Other: return "other";
  }
  return "other";
}

std::vector<SegmentLabel> classify_segments(const DiscreteCurve& curve, const ClassifyThresholds& t) {
  if (curve.size() < 3) {
    return {{0, curve.size() == 0 ? 0 : curve.size() - 1, ShapeKind::Other, 0.0}};
  }
  return Classifier(curve, t).run();
}

}  // namespace thickknot
