#include "thickknot/thickness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>

#include "thickknot/errors.hpp"
#include "thickknot/parallel.hpp"

namespace thickknot {

namespace {

// Pairs whose vertex residual is below this seed a sub-segment refinement.
constexpr double kSeedResidual = 0.25;

struct ScanContext {
  const DiscreteCurve& curve;
  std::vector<Vec3> tangents;
  ArcLength arc;
  double window;
  std::size_t n;

  explicit ScanContext(const DiscreteCurve& c)
      : curve(c),
        tangents(vertex_tangents(c)),
        arc(c),
        window(exclusion_window(c.tube_radius, mean_segment_length(c))),
        n(c.size()) {}

  double residual(std::size_t i, std::size_t j) const {
    const Vec3 c = curve.points[j] - curve.points[i];
    const double d = norm(c);
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    return std::max(std::abs(dot(c, tangents[i])), std::abs(dot(c, tangents[j]))) / d;
  }

  bool admissible(std::size_t i, std::size_t j) const { return arc.distance(i, j) >= window; }

  // Non-strict local minimum of the vertex residual over the 8-neighbourhood.
  bool residual_local_min(std::size_t i, std::size_t j, double value) const {
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        std::int64_t a = static_cast<std::int64_t>(i) + di;
        std::int64_t b = static_cast<std::int64_t>(j) + dj;
        const auto sn = static_cast<std::int64_t>(n);
        if (curve.closed) {
          a = (a + sn) % sn;
          b = (b + sn) % sn;
        } else if (a < 0 || b < 0 || a >= sn || b >= sn) {
          continue;
        }
        if (a == b) continue;
        if (residual(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) < value) return false;
      }
    }
    return true;
  }

  double wrap(double s) const {
    if (!curve.closed) return std::clamp(s, 0.0, static_cast<double>(n - 1));
    const double period = static_cast<double>(n);
    s = std::fmod(s, period);
    return s < 0.0 ? s + period : s;
  }

  Vec3 position(double s) const {
    s = wrap(s);
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i >= n - 1 && !curve.closed) return curve.points[n - 1];
    i = std::min(i, n - 1);
    return lerp(curve.points[i], curve.points[(i + 1) % n], s - static_cast<double>(i));
  }

  Vec3 tangent(double s) const {
    s = wrap(s);
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i >= n - 1 && !curve.closed) return tangents[n - 1];
    i = std::min(i, n - 1);
    return normalized(lerp(tangents[i], tangents[(i + 1) % n], s - static_cast<double>(i)));
  }

  std::array<double, 2> criticality(double s, double t) const {
    const Vec3 c = position(t) - position(s);
    const double d = norm(c);
    if (!(d > 0.0)) return {1.0, 1.0};
    return {dot(c, tangent(s)) / d, dot(c, tangent(t)) / d};
  }
};

struct Refined {
  bool ok = false;
  double s = 0.0, t = 0.0, chord = 0.0, residual = 0.0;
};

// Levenberg-Marquardt on (c . T(s), c . T(t)) = 0 near a vertex pair. The
// damping keeps the step defined on the flat families produced by parallel
// straight strands.
Refined refine_pair(const ScanContext& ctx, std::size_t i, std::size_t j) {
  double s = static_cast<double>(i);
  double t = static_cast<double>(j);
  const double s0 = s, t0 = t;
  constexpr double kStep = 1e-4;
  for (int iter = 0; iter < 40; ++iter) {
    const auto f = ctx.criticality(s, t);
    if (std::max(std::abs(f[0]), std::abs(f[1])) < 1e-12) break;
    const auto fsp = ctx.criticality(s + kStep, t);
    const auto fsm = ctx.criticality(s - kStep, t);
    const auto ftp = ctx.criticality(s, t + kStep);
    const auto ftm = ctx.criticality(s, t - kStep);
    const double j00 = (fsp[0] - fsm[0]) / (2 * kStep), j01 = (ftp[0] - ftm[0]) / (2 * kStep);
    const double j10 = (fsp[1] - fsm[1]) / (2 * kStep), j11 = (ftp[1] - ftm[1]) / (2 * kStep);
    // Normal equations (J^T J + lambda I) d = -J^T f.
    const double a = j00 * j00 + j10 * j10, b = j00 * j01 + j10 * j11, c = j01 * j01 + j11 * j11;
    const double lambda = 1e-9 * (a + c) + 1e-300;
    const double g0 = j00 * f[0] + j10 * f[1], g1 = j01 * f[0] + j11 * f[1];
    const double det = (a + lambda) * (c + lambda) - b * b;
    if (!(std::abs(det) > 0.0)) break;
    double ds = -((c + lambda) * g0 - b * g1) / det;
    double dt = -((a + lambda) * g1 - b * g0) / det;
    const double step = std::max(std::abs(ds), std::abs(dt));
    if (step > 0.5) {
      ds *= 0.5 / step;
      dt *= 0.5 / step;
    }
    s += ds;
    t += dt;
    if (std::abs(s - s0) > 2.0 || std::abs(t - t0) > 2.0) return {};
    if (step < 1e-13) break;
  }
  const auto f = ctx.criticality(s, t);
  Refined r;
  r.s = s;
  r.t = t;
  r.residual = std::max(std::abs(f[0]), std::abs(f[1]));
  r.chord = norm(ctx.position(t) - ctx.position(s));
  r.ok = std::isfinite(r.residual);
  return r;
}

using Seed = std::pair<std::size_t, std::size_t>;

std::vector<Seed> seeds_all_pairs(const ScanContext& ctx) {
  const PointsSoA pts(ctx.curve.points);
  const PointsSoA tan(ctx.tangents);
  const auto& k = kernels::active();
  const std::size_t n = ctx.n;
  const std::size_t chunks = thread_count();
  std::vector<std::vector<Seed>> per_chunk(std::max<std::size_t>(1, std::min(chunks, n)));
  parallel_chunks(
      n,
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::vector<double> d2(n), dp(n), dq(n);
        auto& out = per_chunk[chunk];
        for (std::size_t i = begin; i < end; ++i) {
          if (i + 1 >= n) continue;
          k.chord_row(ctx.curve.points[i], ctx.tangents[i], pts, tan, i + 1, n, d2.data(), dp.data(),
                      dq.data());
          const double tol2 = kSeedResidual * kSeedResidual;
          for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t m = j - i - 1;
            const double lim = tol2 * d2[m];
            if (dp[m] * dp[m] <= lim && dq[m] * dq[m] <= lim && d2[m] > 0.0 && ctx.admissible(i, j)) {
              out.emplace_back(i, j);
            }
          }
        }
      },
      chunks);
  std::vector<Seed> seeds;
  for (auto& v : per_chunk) seeds.insert(seeds.end(), v.begin(), v.end());
  return seeds;
}

std::vector<Seed> seeds_spatial_hash(const ScanContext& ctx, double radius) {
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  auto key_of = [radius](const Vec3& p) {
    return Key{static_cast<std::int64_t>(std::floor(p.x / radius)),
               static_cast<std::int64_t>(std::floor(p.y / radius)),
               static_cast<std::int64_t>(std::floor(p.z / radius))};
  };
  std::map<Key, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < ctx.n; ++i) grid[key_of(ctx.curve.points[i])].push_back(i);

  std::vector<Seed> seeds;
  std::vector<std::size_t> near;
  const double r2max = radius * radius;
  for (std::size_t i = 0; i < ctx.n; ++i) {
    const auto [cx, cy, cz] = key_of(ctx.curve.points[i]);
    near.clear();
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = grid.find(Key{cx + dx, cy + dy, cz + dz});
          if (it == grid.end()) continue;
          for (std::size_t j : it->second)
            if (j > i) near.push_back(j);
        }
    std::sort(near.begin(), near.end());
    for (std::size_t j : near) {
      const Vec3 c = ctx.curve.points[j] - ctx.curve.points[i];
      const double d2 = norm2(c);
      if (d2 > r2max || !(d2 > 0.0)) continue;
      const double dp = dot(c, ctx.tangents[i]);
      const double dq = dot(c, ctx.tangents[j]);
      const double lim = kSeedResidual * kSeedResidual * d2;
      if (dp * dp <= lim && dq * dq <= lim && ctx.admissible(i, j)) seeds.emplace_back(i, j);
    }
  }
  return seeds;
}

std::vector<DoublyCriticalPair> pairs_from_seeds(const ScanContext& ctx, const std::vector<Seed>& seeds,
                                                 const ThicknessParams& params) {
  std::vector<DoublyCriticalPair> out;
  std::map<Seed, std::size_t> seen;
  for (const auto& [i, j] : seeds) {
    const double res = ctx.residual(i, j);
    if (!ctx.residual_local_min(i, j, res)) continue;
    DoublyCriticalPair pair;
    const Refined r = refine_pair(ctx, i, j);
    if (r.ok && r.residual <= params.orthogonality_tolerance) {
      const auto wrap_index = [&](double s) {
        const auto k = static_cast<std::int64_t>(std::llround(ctx.wrap(s)));
        return static_cast<std::size_t>(ctx.curve.closed ? k % static_cast<std::int64_t>(ctx.n)
                                                         : std::min<std::int64_t>(k, ctx.n - 1));
      };
      pair.index_a = wrap_index(r.s);
      pair.index_b = wrap_index(r.t);
      pair.chord_length = r.chord;
      pair.orthogonality_residual = r.residual;
    } else if (res <= params.orthogonality_tolerance) {
      pair.index_a = i;
      pair.index_b = j;
      pair.chord_length = distance(ctx.curve.points[i], ctx.curve.points[j]);
      pair.orthogonality_residual = res;
    } else {
      continue;
    }
    if (pair.index_a > pair.index_b) std::swap(pair.index_a, pair.index_b);
    if (pair.index_a == pair.index_b || !ctx.admissible(pair.index_a, pair.index_b)) continue;
    pair.near_window = ctx.arc.distance(pair.index_a, pair.index_b) < 1.1 * ctx.window;
    const Seed key{pair.index_a, pair.index_b};
    if (auto it = seen.find(key); it != seen.end()) {
      auto& existing = out[it->second];
      if (pair.orthogonality_residual < existing.orthogonality_residual) existing = pair;
      continue;
    }
    seen.emplace(key, out.size());
    out.push_back(pair);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.chord_length, a.index_a, a.index_b) < std::tie(b.chord_length, b.index_a, b.index_b);
  });
  return out;
}

}  // namespace

std::vector<DoublyCriticalPair> doubly_critical_pairs(const DiscreteCurve& curve,
                                                      const ThicknessParams& params, PairSearch search) {
  if (curve.size() < 4) return {};
  const ScanContext ctx(curve);
  if (search == PairSearch::Auto) {
    search = curve.size() < params.brute_force_below ? PairSearch::AllPairs : PairSearch::SpatialHash;
  }
  if (search == PairSearch::AllPairs) return pairs_from_seeds(ctx, seeds_all_pairs(ctx), params);

  // Grow the search radius until a pair is found inside it; any pair with a
  // chord below the radius is then guaranteed to be among the seeds.
  const double span = diameter(curve);
  for (double radius = 2.0;; radius *= 2.0) {
    if (radius >= span) return pairs_from_seeds(ctx, seeds_all_pairs(ctx), params);
    auto pairs = pairs_from_seeds(ctx, seeds_spatial_hash(ctx, radius), params);
    // Refinement can move a chord slightly past the seed radius.
    std::erase_if(pairs, [radius](const auto& p) { return p.chord_length > radius; });
    if (!pairs.empty()) return pairs;
  }
}

double r2(const DiscreteCurve& curve, const ThicknessParams& params) {
  const auto pairs = doubly_critical_pairs(curve, params);
  return pairs.empty() ? std::numeric_limits<double>::infinity() : pairs.front().chord_length;
}

double thickness(const DiscreteCurve& curve, const ThicknessParams& params) {
  return std::min(2.0, r2(curve, params));
}

TubeDistance::TubeDistance(const DiscreteCurve& curve)
    : segments_(curve.points, curve.closed), radius_(curve.tube_radius) {}

double TubeDistance::centerline_distance(const Vec3& q) const {
  return std::sqrt(kernels::active().min_segment_distance2(q, segments_));
}

double TubeDistance::reach(const Vec3& q) const {
  return std::max(0.0, centerline_distance(q) - radius_);
}

double reach_at(const DiscreteCurve& curve, const Vec3& query) {
  return TubeDistance(curve).reach(query);
}

MembershipVerdict membership_from_report(const GeometricReport& report, double tau,
                                         const ThicknessParams& params) {
  if (!(tau >= 0.0 && tau <= 2.0)) throw Error(ErrorCode::InvalidArgument, "tau outside [0, 2]");
  MembershipVerdict v;
  v.tau = tau;
  v.max_curvature = report.max_curvature;
  v.thickness = report.thickness;
  if (report.max_curvature > 1.0 + params.curvature_slack) v.reasons.emplace_back("curvature");
  if (report.thickness < tau - params.thickness_slack) v.reasons.emplace_back("thickness");
  v.is_member = v.reasons.empty();
  return v;
}

MembershipVerdict check_membership(const DiscreteCurve& curve, double tau, const ThicknessParams& params) {
  if (!curve.closed) throw Error(ErrorCode::NotAKnot, "membership is defined for closed curves only");
  return membership_from_report(geometric_report(curve, params), tau, params);
}

GeometricReport geometric_report(const DiscreteCurve& curve, const ThicknessParams& params) {
  GeometricReport r;
  r.length = length(curve);
  r.max_curvature = max_curvature(curve);
  r.r2 = thickknot::r2(curve, params);
  r.thickness = std::min(2.0, r.r2);
  r.diameter = diameter(curve);
  return r;
}

}  // namespace thickknot
