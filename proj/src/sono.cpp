#include "thickknot/sono.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "thickknot/errors.hpp"
#include "thickknot/parallel.hpp"
#include "thickknot/thickness.hpp"

namespace thickknot {

namespace {

// Penetrations below this fraction of tau are rounding, not contact.
constexpr double kDetectFraction = 1e-4;
// remove_overlaps succeeds once the deepest penetration is below this.
constexpr double kResolvedFraction = 1e-3;
// Extra separation added to every push so a resolved pair stays resolved.
// Kept small: a larger margin outpaces the shrink step and the curve grows.
constexpr double kMarginFraction = 2e-5;
// Half-width, as a fraction of tau, over which a push is spread.
constexpr double kSpreadFraction = 0.02;

using Mask = std::vector<std::vector<bool>>;

struct Flat {
  std::vector<Vec3> points;
  std::vector<std::size_t> component;  // per global index
  std::vector<std::size_t> local;      // index inside its component
  std::vector<std::size_t> offset;     // first global index of each component
};

Flat flatten(const CurveBundle& b) {
  Flat f;
  for (std::size_t c = 0; c < b.components.size(); ++c) {
    f.offset.push_back(f.points.size());
    const auto& pts = b.components[c].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      f.points.push_back(pts[i]);
      f.component.push_back(c);
      f.local.push_back(i);
    }
  }
  return f;
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

CellKey cell_of(const Vec3& p, double size) {
  return {static_cast<std::int64_t>(std::floor(p.x / size)), static_cast<std::int64_t>(std::floor(p.y / size)),
          static_cast<std::int64_t>(std::floor(p.z / size))};
}

// Required separation of two beads on one component that are `s` apart
// along it. Far apart (beyond the exclusion window) it is tau. Closer in it
// is the chord a unit-curvature arc of length s would have, which is the
// least any feasible curve can achieve; anything shorter is a violation.
double required_separation(double s, double tau, double window) {
  if (s >= window) return tau;
  return std::min(tau, 2.0 * std::sin(0.5 * std::min(s, kPi)));
}

std::vector<Overlap> detect_flat(const CurveBundle& bundle, const Flat& f, double tau) {
  const std::size_t n = f.points.size();
  if (n == 0 || !(tau > 0.0)) return {};
  std::vector<ArcLength> arcs;
  std::vector<double> window, near_cut;
  for (const auto& c : bundle.components) {
    arcs.emplace_back(c);
    const double h = c.segment_count() ? mean_segment_length(c) : 0.0;
    window.push_back(std::min(exclusion_window(0.5 * tau, h), exclusion_window(1.0, 0.0)));
    near_cut.push_back(3.0 * h);
  }
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
  for (std::size_t i = 0; i < n; ++i) grid[cell_of(f.points[i], tau)].push_back(i);

  const double slack = kDetectFraction * tau;
  const std::size_t chunks = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / 256));
  std::vector<std::vector<Overlap>> found(chunks);
  parallel_chunks(
      n,
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& out = found[chunk];
        for (std::size_t i = begin; i < end; ++i) {
          const CellKey k = cell_of(f.points[i], tau);
          for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
              for (std::int64_t dz = -1; dz <= 1; ++dz) {
                auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
                if (it == grid.end()) continue;
                for (std::size_t j : it->second) {
                  if (j <= i) continue;
                  const double d = distance(f.points[i], f.points[j]);
                  if (d >= tau - slack) continue;
                  double need = tau;
                  const std::size_t c = f.component[i];
                  if (c == f.component[j]) {
                    const double s = arcs[c].distance(f.local[i], f.local[j]);
                    if (s < near_cut[c]) continue;
                    need = required_separation(s, tau, window[c]);
                  }
                  if (d < need - slack) out.push_back({i, j, need - d});
                }
              }
            }
          }
        }
      },
      chunks);
  std::vector<Overlap> all;
  for (auto& v : found) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), [](const Overlap& a, const Overlap& b) {
    return a.a != b.a ? a.a < b.a : a.b < b.b;
  });
  return all;
}

double max_depth(const std::vector<Overlap>& v) {
  double m = 0.0;
  for (const auto& o : v) m = std::max(m, o.depth);
  return m;
}

bool is_fixed(const Mask* fixed, std::size_t c, std::size_t i) {
  return fixed != nullptr && c < fixed->size() && i < (*fixed)[c].size() && (*fixed)[c][i];
}

// Index of the vertex k steps from i on a component, or nullopt past an open end.
std::optional<std::size_t> step(const DiscreteCurve& c, std::size_t i, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(c.size());
  std::int64_t j = static_cast<std::int64_t>(i) + k;
  if (c.closed) {
    j %= n;
    if (j < 0) j += n;
  } else if (j < 0 || j >= n) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(j);
}

std::size_t spread_width(const DiscreteCurve& c, double tau) {
  const double h = mean_segment_length(c);
  const double w = std::round(kSpreadFraction * tau / h);
  return static_cast<std::size_t>(std::clamp(w, 1.0, 32.0));
}

}  // namespace

std::vector<Overlap> detect_overlaps(const CurveBundle& bundle, double tau) {
  return detect_flat(bundle, flatten(bundle), tau);
}

std::vector<Overlap> detect_overlaps(const DiscreteCurve& curve, double tau) {
  CurveBundle b;
  b.components.push_back(curve);
  return detect_overlaps(b, tau);
}

OverlapRemoval remove_overlaps(const CurveBundle& bundle, double tau, int sweeps, const Mask* fixed) {
  OverlapRemoval out{bundle, 0.0, 0, true};
  const double margin = kMarginFraction * tau;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const Flat f = flatten(out.bundle);
    const auto overlaps = detect_flat(out.bundle, f, tau);
    out.max_penetration = max_depth(overlaps);
    if (overlaps.empty()) break;
    ++out.sweeps;

    // Average push wanted by each vertex over all its overlapping partners.
    std::vector<Vec3> push(f.points.size());
    std::vector<int> count(f.points.size(), 0);
    for (const auto& o : overlaps) {
      Vec3 u = f.points[o.b] - f.points[o.a];
      const double d = norm(u);
      if (d > 1e-12) {
        u = u / d;
      } else {
        // Fused beads: separate along any direction normal to the curve.
        const auto& comp = out.bundle.components[f.component[o.a]];
        u = any_orthogonal(vertex_tangents(comp)[f.local[o.a]]);
      }
      const bool fa = is_fixed(fixed, f.component[o.a], f.local[o.a]);
      const bool fb = is_fixed(fixed, f.component[o.b], f.local[o.b]);
      if (fa && fb) continue;
      const double total = o.depth + 2.0 * margin;
      const double share_a = fa ? 0.0 : (fb ? total : 0.5 * total);
      const double share_b = total - share_a;
      push[o.a] -= u * share_a;
      push[o.b] += u * share_b;
      ++count[o.a];
      ++count[o.b];
    }
    for (std::size_t i = 0; i < push.size(); ++i) {
      if (count[i] > 0) push[i] = push[i] / static_cast<double>(count[i]);
    }

    // Spread each push over neighbours with a smooth bump, normalised by the
    // weight of pushing neighbours so a band of equal pushes is not amplified.
    for (std::size_t c = 0; c < out.bundle.components.size(); ++c) {
      auto& comp = out.bundle.components[c];
      const std::size_t off = f.offset[c];
      const auto m = static_cast<std::int64_t>(spread_width(comp, tau));
      std::vector<Vec3> moved = comp.points;
      for (std::size_t i = 0; i < comp.size(); ++i) {
        if (is_fixed(fixed, c, i)) continue;
        Vec3 sum;
        double mass = 0.0;
        for (std::int64_t k = -m; k <= m; ++k) {
          const auto j = step(comp, i, k);
          if (!j || count[off + *j] == 0) continue;
          const double x = static_cast<double>(k) / static_cast<double>(m + 1);
          const double w = (1.0 - x * x) * (1.0 - x * x);
          sum += push[off + *j] * w;
          mass += w;
        }
        if (mass > 0.0) moved[i] += sum / std::max(1.0, mass);
      }
      comp.points = std::move(moved);
    }
  }
  out.max_penetration = max_depth(detect_overlaps(out.bundle, tau));
  out.resolved = out.max_penetration <= kResolvedFraction * tau;
  return out;
}

DiscreteCurve remove_overlaps(const DiscreteCurve& curve, double tau, int sweeps) {
  CurveBundle b;
  b.components.push_back(curve);
  return remove_overlaps(b, tau, sweeps).bundle.components.front();
}

namespace {

// Resamples the stretch between the clamped ends of an open component (or
// the whole component when nothing is clamped), keeping the clamped vertices
// exactly where they are.
void equalize_free(DiscreteCurve& comp, std::size_t c, const Mask* fixed) {
  const std::size_t n = comp.size();
  std::size_t lo = 0, hi = n - 1;
  if (!comp.closed && fixed != nullptr) {
    while (lo + 1 < n && is_fixed(fixed, c, lo + 1)) ++lo;
    while (hi > lo + 1 && is_fixed(fixed, c, hi - 1)) --hi;
  }
  if (comp.closed || (lo == 0 && hi == n - 1)) {
    comp = resample_once(comp, n);
    return;
  }
  if (hi <= lo + 1) return;
  DiscreteCurve mid{{comp.points.begin() + static_cast<std::ptrdiff_t>(lo),
                     comp.points.begin() + static_cast<std::ptrdiff_t>(hi) + 1},
                    false, comp.tube_radius};
  mid = resample_once(mid, hi - lo + 1);
  std::copy(mid.points.begin(), mid.points.end(), comp.points.begin() + static_cast<std::ptrdiff_t>(lo));
}

// One Gauss-Seidel pass at stride k over the second differences
// e = p[i-k] - 2 p[i] + p[i+k]. An offending triple is projected the way a
// position-based solver treats a bending constraint: all three points move
// along e, weighted by whether they may move, until the estimate meets the
// bound. Each move is shared with hat weights by the vertices around it so
// coarse corrections do not leave kinks. An open end whose first two
// vertices are clamped is continued by a virtual straight ray, so coarse
// strides reach the end and respect its tangent.
bool smooth_at_scale(DiscreteCurve& comp, std::size_t k, double bound, std::size_t c, const Mask* fixed) {
  const std::size_t n = comp.size();
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto sk = static_cast<std::ptrdiff_t>(k);
  const double h = mean_segment_length(comp);
  const bool ray_lo = !comp.closed && is_fixed(fixed, c, 0) && is_fixed(fixed, c, 1);
  const bool ray_hi = !comp.closed && is_fixed(fixed, c, n - 1) && is_fixed(fixed, c, n - 2);
  auto wrap = [&](std::ptrdiff_t j) { return comp.closed ? ((j % sn) + sn) % sn : j; };
  auto point = [&](std::ptrdiff_t j) -> Vec3 {
    const auto& p = comp.points;
    j = wrap(j);
    if (j < 0) return p[0] + (p[0] - p[1]) * static_cast<double>(-j);
    if (j >= sn) return p[n - 1] + (p[n - 1] - p[n - 2]) * static_cast<double>(j - sn + 1);
    return p[static_cast<std::size_t>(j)];
  };
  auto movable = [&](std::ptrdiff_t j) {
    j = wrap(j);
    return j >= 0 && j < sn && !is_fixed(fixed, c, static_cast<std::size_t>(j));
  };
  auto spread = [&](std::ptrdiff_t centre, const Vec3& delta) {
    for (std::ptrdiff_t d = 0; d < sk; ++d) {
      const double w = 1.0 - static_cast<double>(d) / static_cast<double>(k);
      for (std::ptrdiff_t j : {centre + d, centre - d}) {
        if (movable(j)) comp.points[static_cast<std::size_t>(wrap(j))] += delta * w;
        if (d == 0) break;
      }
    }
  };

  const std::ptrdiff_t first = comp.closed ? 0 : (ray_lo ? 0 : sk);
  const std::ptrdiff_t last = comp.closed ? sn : (ray_hi ? sn : sn - sk);
  const double cap = 0.25 * h * static_cast<double>(k);
  bool changed = false;
  for (std::ptrdiff_t i = first; i < last; ++i) {
    const Vec3 pa = point(i - sk), pi = point(i), pb = point(i + sk);
    const Vec3 u = pi - pa, v = pb - pi;
    const double lu = norm(u), lv = norm(v);
    if (!(lu > 0.0 && lv > 0.0)) continue;
    const double kappa = 2.0 * std::sin(0.5 * angle_between(u, v)) / (0.5 * (lu + lv));
    if (!(kappa > bound * (1.0 + 1e-9))) continue;
    const Vec3 e = pa + pb - pi * 2.0;
    const double le = norm(e);
    if (!(le > 0.0)) continue;
    const double ma = movable(i - sk) ? 1.0 : 0.0, mi = movable(i) ? 1.0 : 0.0, mb = movable(i + sk) ? 1.0 : 0.0;
    const double mass = ma + 4.0 * mi + mb;
    if (mass == 0.0) continue;
    // Aim a little under the bound: the resample after each sweep gives
    // back a fraction of a percent.
    const double excess = le * (1.0 - bound / kappa * (1.0 - 1e-2));
    const double w = std::min(excess / mass, cap);
    const Vec3 dir = e / le;
    if (ma > 0.0) spread(i - sk, dir * (-w));
    if (mi > 0.0) spread(i, dir * (2.0 * w));
    if (mb > 0.0) spread(i + sk, dir * (-w));
    changed = true;
  }
  return changed;
}

}  // namespace

CurveBundle control_curvature(const CurveBundle& bundle, double bound, int sweeps, const Mask* fixed) {
  CurveBundle out = bundle;
  for (std::size_t c = 0; c < out.components.size(); ++c) {
    auto& comp = out.components[c];
    const std::size_t n = comp.size();
    if (n < 3) continue;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      if (!(max_curvature(comp) > bound * (1.0 + 1e-9))) break;
      for (std::size_t k = 16; k >= 1; k /= 2) {
        if (comp.closed ? 4 * k > n : 2 * k + 1 > n) continue;
        smooth_at_scale(comp, k, bound, c, fixed);
      }
      // Midpoint moves shorten the segments around a kink, which raises the
      // estimate again; re-equalise before the next sweep.
      equalize_free(comp, c, fixed);
    }
  }
  return out;
}

DiscreteCurve control_curvature(const DiscreteCurve& curve, double bound, int sweeps) {
  CurveBundle b;
  b.components.push_back(curve);
  return control_curvature(b, bound, sweeps).components.front();
}

DiscreteCurve shrink_step(const DiscreteCurve& curve, double rate) {
  if (rate == 1.0) return curve;
  return scaled(curve, rate, centroid(curve));
}

namespace {

struct Clamp {
  Configuration start, end;
};

// A shrink step that has been halved down to this fraction of the nominal
// one without being accepted means the curve is jammed.
constexpr double kJamFactor = 64.0;

class Tightener {
 public:
  Tightener(CurveBundle bundle, const TightenConfig& config, bool open)
      : bundle_(std::move(bundle)), config_(config), open_(open) {
    if (!(config.target_thickness > 0.0 && config.target_thickness <= 2.0)) {
      throw Error(ErrorCode::InvalidArgument, "target thickness must lie in (0, 2]");
    }
    if (!(config.shrink_rate > 0.99 && config.shrink_rate < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "shrink rate must lie in (0.99, 1)");
    }
    tau_ = config.target_thickness;
    bound_ = 1.0 + 0.25 * config.curvature_slack;
    for (auto& c : bundle_.components) {
      validate(c);
      c.tube_radius = 0.5 * tau_;
      sizes_.push_back(c.size());
    }
    if (open_) setup_clamps();
  }

  TightenResult run(const TightenObserver& observer) {
    repair_start();
    TightenResult result;
    double length_now = total_length();
    std::vector<double> lengths{length_now};
    int it = 0;
    shrink_ = 1.0 - config_.shrink_rate;
    for (it = 1; it <= config_.max_iters; ++it) {
      if (!iterate()) {
        result.converged = true;
        break;
      }
      length_now = total_length();
      lengths.push_back(length_now);
      if (it % config_.sample_every == 0) {
        result.length_history.push_back(length_now);
        if (observer) observer({it, length_now, &bundle_});
      }
      const int w = config_.stall_window;
      if (it >= w) {
        const double old = lengths[static_cast<std::size_t>(it - w)];
        if (std::abs(old - length_now) / (length_now * w) < config_.stall_tolerance) {
          result.converged = true;
          break;
        }
      }
    }
    result.iterations = std::min(it, config_.max_iters);
    polish();
    result.final_bundle = bundle_;
    result.final_curve = bundle_.components.front();
    result.report = geometric_report(result.final_curve);
    result.max_penetration = max_depth(detect_overlaps(bundle_, tau_));
    if (result.length_history.empty() || result.length_history.back() != total_length()) {
      result.length_history.push_back(total_length());
    }
    return result;
  }

 private:
  void setup_clamps() {
    const auto& walls = *config_.walls;
    for (auto& c : bundle_.components) {
      if (c.closed) throw Error(ErrorCode::PreconditionViolated, "wall-clamped tightening needs open components");
      if (c.size() < 6) throw Error(ErrorCode::DegenerateCurve, "open component too short to clamp");
      const Vec3 a = c.points.front(), b = c.points.back();
      if (std::abs(a.z - walls.z_low) > 1e-6 || std::abs(b.z - walls.z_high) > 1e-6) {
        throw Error(ErrorCode::PreconditionViolated, "component ends must lie on the lower and upper walls");
      }
      const Vec3 ta = normalized(c.points[1] - a), tb = normalized(b - c.points[c.size() - 2]);
      if (distance(ta, Vec3{0, 0, 1}) > 1e-6 || distance(tb, Vec3{0, 0, 1}) > 1e-6) {
        throw Error(ErrorCode::PreconditionViolated, "end tangents must be normal to the walls");
      }
      clamps_.push_back({Configuration::make(a, {0, 0, 1}), Configuration::make(b, {0, 0, 1})});
      std::vector<bool> mask(c.size(), false);
      mask[0] = mask[1] = mask[c.size() - 1] = mask[c.size() - 2] = true;
      fixed_.push_back(std::move(mask));
    }
  }

  const Mask* fixed() const { return open_ ? &fixed_ : nullptr; }

  double total_length() const {
    double l = 0.0;
    for (const auto& c : bundle_.components) l += length(c);
    return l;
  }

  void apply_clamps() {
    if (!open_) return;
    const auto& walls = *config_.walls;
    for (std::size_t k = 0; k < bundle_.components.size(); ++k) {
      auto& c = bundle_.components[k];
      const double h = mean_segment_length(c);
      const std::size_t n = c.size();
      for (auto& p : c.points) p.z = std::clamp(p.z, walls.z_low, walls.z_high);
      c.points[0] = clamps_[k].start.position;
      c.points[1] = clamps_[k].start.position + clamps_[k].start.tangent * h;
      c.points[n - 1] = clamps_[k].end.position;
      c.points[n - 2] = clamps_[k].end.position - clamps_[k].end.tangent * h;
    }
  }

  void equalize() {
    for (std::size_t k = 0; k < bundle_.components.size(); ++k) {
      bundle_.components[k] = resample(bundle_.components[k], sizes_[k]);
    }
    apply_clamps();
  }

  void project() {
    bundle_ = remove_overlaps(bundle_, tau_, config_.overlap_push_iters, fixed()).bundle;
    bundle_ = control_curvature(bundle_, bound_, 200, fixed());
    apply_clamps();
  }

  bool feasible() const {
    for (const auto& c : bundle_.components) {
      if (max_curvature(c) > 1.0 + config_.curvature_slack) return false;
    }
    return max_depth(detect_overlaps(bundle_, tau_)) <= kResolvedFraction * tau_;
  }

  void repair_start() {
    apply_clamps();
    for (int round = 0; round < 200 && !feasible(); ++round) {
      project();
      equalize();
    }
    if (!feasible()) {
      throw Error(ErrorCode::InfeasibleStart, "could not repair the starting curve", "tighten");
    }
  }

  // One shrink-and-project step. The step is kept only if the result is
  // feasible and no longer than before; otherwise it is undone and the next
  // attempt shrinks by half as much. Returns false once the shrink has
  // collapsed, i.e. the curve is jammed.
  bool iterate() {
    const CurveBundle before = bundle_;
    const double length_before = total_length();
    Vec3 center;
    std::size_t count = 0;
    for (const auto& c : bundle_.components) {
      for (const auto& p : c.points) center += p;
      count += c.size();
    }
    center = center / static_cast<double>(count);
    for (auto& c : bundle_.components) c = scaled(c, 1.0 - shrink_, center);
    equalize();
    project();
    const double nominal = 1.0 - config_.shrink_rate;
    if (feasible() && total_length() <= length_before) {
      shrink_ = std::min(nominal, shrink_ * 1.5);
      return true;
    }
    bundle_ = before;
    shrink_ *= 0.5;
    return shrink_ >= nominal / kJamFactor;
  }

  void polish() {
    for (int round = 0; round < 20 && !feasible(); ++round) {
      project();
    }
  }

  CurveBundle bundle_;
  TightenConfig config_;
  bool open_;
  double tau_ = 2.0;
  double bound_ = 1.0;
  double shrink_ = 0.0;
  std::vector<std::size_t> sizes_;
  std::vector<Clamp> clamps_;
  Mask fixed_;
};

}  // namespace

TightenResult tighten(const DiscreteCurve& curve, const TightenConfig& config, const TightenObserver& observer) {
  if (!curve.closed) throw Error(ErrorCode::PreconditionViolated, "tighten expects a closed curve; use tighten_open");
  CurveBundle b;
  b.components.push_back(curve);
  return Tightener(std::move(b), config, false).run(observer);
}

TightenResult tighten_open(const CurveBundle& core, const TightenConfig& config, const TightenObserver& observer) {
  if (!config.walls) throw Error(ErrorCode::InvalidArgument, "open tightening needs wall planes");
  if (core.components.empty()) throw Error(ErrorCode::DegenerateCurve, "empty bundle");
  return Tightener(core, config, true).run(observer);
}

TightenResult tighten_open(const DiscreteCurve& core, const TightenConfig& config, const TightenObserver& observer) {
  CurveBundle b;
  b.components.push_back(core);
  return tighten_open(b, config, observer);
}

}  // namespace thickknot
