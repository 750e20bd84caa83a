#include "thickknot/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thickknot/errors.hpp"
#include "thickknot/frames.hpp"
#include "thickknot/thickness.hpp"

namespace thickknot {

namespace {

// (2,3) torus knot, scaled. Its tangent at t = 0 points along (0, 2, 1).
Vec3 torus_trefoil(double t, double scale) {
  const double r = 2.0 + std::cos(3.0 * t);
  return Vec3{r * std::cos(2.0 * t), r * std::sin(2.0 * t), std::sin(3.0 * t)} * scale;
}

// Cubic Hermite samples from a (tangent ta) to b (tangent tb), endpoints
// excluded.
void hermite(std::vector<Vec3>& out, const Vec3& a, const Vec3& ta, const Vec3& b, const Vec3& tb, int steps) {
  const double m = distance(a, b);
  for (int k = 1; k < steps; ++k) {
    const double u = static_cast<double>(k) / steps;
    const double u2 = u * u, u3 = u2 * u;
    out.push_back(a * (2 * u3 - 3 * u2 + 1) + ta * (m * (u3 - 2 * u2 + u)) + b * (-2 * u3 + 3 * u2) +
                  tb * (m * (u3 - u2)));
  }
}

void straight(std::vector<Vec3>& out, const Vec3& a, const Vec3& b, double spacing) {
  const int steps = std::max(1, static_cast<int>(std::ceil(distance(a, b) / spacing)));
  for (int k = 0; k < steps; ++k) out.push_back(lerp(a, b, static_cast<double>(k) / steps));
}

std::vector<std::vector<bool>> end_mask(const CurveBundle& b) {
  std::vector<std::vector<bool>> mask;
  for (const auto& c : b.components) {
    std::vector<bool> m(c.size(), false);
    if (!c.closed && c.size() >= 4) m[0] = m[1] = m[c.size() - 2] = m[c.size() - 1] = true;
    mask.push_back(std::move(m));
  }
  return mask;
}

}  // namespace

DiscreteCurve round_circle(double radius, std::size_t n, double tube_radius) {
  if (n < 8) throw Error(ErrorCode::InvalidArgument, "round_circle needs n >= 8");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  DiscreteCurve c;
  c.closed = true;
  c.tube_radius = tube_radius;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    c.points.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  return c;
}

DiscreteCurve open_overhand(double wall_gap, std::size_t n) {
  if (n < 64) throw Error(ErrorCode::InvalidArgument, "open_overhand needs n >= 64");
  // At this scale the closed torus trefoil has R2 about 2.16 and curvature
  // about 0.54, so the body starts thick enough for tau = 2.
  constexpr double kScale = 1.3;
  // Removed parameter half-width around the cut; the lead-in curves replace it.
  constexpr double kCut = 0.12;
  constexpr double kLeadDepth = 2.5;
  constexpr double kLeadOffset = 1.2;

  // Tilt so the tangent at the cut is horizontal (+y), then centre in the slab.
  const double tilt = -std::atan(0.5);
  auto body = [&](double t) {
    return rotate(torus_trefoil(t, kScale), {1, 0, 0}, tilt) + Vec3{0, 0, 0.5 * wall_gap};
  };
  auto body_tangent = [&](double t) {
    const double e = 1e-6;
    return normalized(body(t + e) - body(t - e));
  };

  const int body_steps = 2000;
  std::vector<Vec3> knot;
  double max_x = -1e300, min_z = 1e300, max_z = -1e300;
  for (int k = 0; k <= body_steps; ++k) {
    const double t = kCut + (2.0 * kPi - 2.0 * kCut) * k / body_steps;
    knot.push_back(body(t));
    max_x = std::max(max_x, knot.back().x);
    min_z = std::min(min_z, knot.back().z);
    max_z = std::max(max_z, knot.back().z);
  }
  const Vec3 a = knot.front(), b = knot.back();
  const Vec3 ta = body_tangent(kCut), tb = body_tangent(2.0 * kPi - kCut);
  const double lead_x = max_x + kLeadOffset;
  const double lead_y = 0.5 * (a.y + b.y);
  const Vec3 bottom{lead_x, lead_y, 0.0}, top{lead_x, lead_y, wall_gap};
  const Vec3 below{lead_x, lead_y, a.z - kLeadDepth}, above{lead_x, lead_y, b.z + kLeadDepth};
  if (below.z <= 0.5 || above.z >= wall_gap - 0.5 || min_z <= 0.0 || max_z >= wall_gap) {
    throw Error(ErrorCode::InfeasibleSeed, "wall gap too small for the overhand seed", "open_overhand");
  }

  std::vector<Vec3> pts;
  straight(pts, bottom, below, 0.05);
  pts.push_back(below);
  hermite(pts, below, {0, 0, 1}, a, ta, 200);
  pts.insert(pts.end(), knot.begin(), knot.end());
  hermite(pts, b, tb, above, {0, 0, 1}, 200);
  straight(pts, above, top, 0.05);
  pts.push_back(top);
  for (auto& p : pts) p -= Vec3{lead_x, lead_y, 0.0};

  DiscreteCurve seed = resample(DiscreteCurve{pts, false, 1.0}, n);
  CurveBundle bundle;
  bundle.components.push_back(seed);
  const auto mask = end_mask(bundle);
  bundle = control_curvature(bundle, 1.0, 400, &mask);
  seed = bundle.components.front();

  if (max_curvature(seed) > 1.0 + kCurvatureSlack) {
    throw Error(ErrorCode::InfeasibleSeed, "curvature repair of the overhand seed failed", "open_overhand");
  }
  for (const auto& p : seed.points) {
    if (p.z < -1e-9 || p.z > wall_gap + 1e-9) {
      throw Error(ErrorCode::InfeasibleSeed, "overhand seed leaves the slab", "open_overhand");
    }
  }
  return seed;
}

DiscreteCurve close_far(const DiscreteCurve& open) {
  if (open.closed || open.size() < 2) throw Error(ErrorCode::InvalidArgument, "close_far needs an open curve");
  const Vec3 a = open.points.front(), b = open.points.back();
  const Vec3 c = centroid(open);
  Vec3 away{a.x - c.x, a.y - c.y, 0.0};
  away = norm(away) > 1e-9 ? normalized(away) : Vec3{1, 0, 0};
  double reach = 0.0;
  for (const auto& p : open.points) reach = std::max(reach, distance(p, a));
  const double far = reach + 2.0;
  const double lo = std::min(a.z, b.z) - 2.0, hi = std::max(a.z, b.z) + 2.0;
  DiscreteCurve out = open;
  out.closed = true;
  const double h = mean_segment_length(open);
  std::vector<Vec3> path{b, {b.x, b.y, hi}, Vec3{b.x, b.y, hi} + away * far, Vec3{a.x, a.y, lo} + away * far,
                         {a.x, a.y, lo}, a};
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    std::vector<Vec3> seg;
    straight(seg, path[k], path[k + 1], h);
    out.points.insert(out.points.end(), seg.begin() + 1, seg.end());
  }
  return out;
}

CurveBundle doubled_core(const DiscreteCurve& core, double offset, bool strict, double curvature_slack,
                         std::optional<Vec3> initial_normal) {
  validate(core);
  if (!(offset > 0.0)) throw Error(ErrorCode::InvalidArgument, "offset must be positive");
  const auto frame = rotation_minimizing_frame(core, initial_normal);
  const std::size_t n = core.size();
  std::vector<Vec3> binormals(n);
  for (std::size_t i = 0; i < n; ++i) binormals[i] = cross(frame.tangents[i], frame.normals[i]);

  auto build = [&](double angle) {
    CurveBundle b;
    for (double side : {1.0, -1.0}) {
      DiscreteCurve strand{{}, core.closed, 0.5 * offset};
      strand.points.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 normal = frame.normals[i] * std::cos(angle) + binormals[i] * std::sin(angle);
        strand.points.push_back(core.points[i] + normal * (side * offset));
      }
      strand = resample(strand, n);
      if (!core.closed) {
        // Keep the core's end tangents so the strands can be clamped the same way.
        const double h = mean_segment_length(strand);
        strand.points[1] = strand.points[0] + normalized(core.points[1] - core.points[0]) * h;
        strand.points[n - 2] = strand.points[n - 1] - normalized(core.points[n - 1] - core.points[n - 2]) * h;
      }
      b.components.push_back(std::move(strand));
    }
    return b;
  };
  auto worst = [](const CurveBundle& b) {
    double k = 0.0;
    for (const auto& c : b.components) k = std::max(k, max_curvature(c));
    return k;
  };

  // Rotating the starting normal rotates every normal by the same angle, so a
  // one-parameter scan covers all twist-free framings. Half a turn suffices:
  // the two strands swap under a rotation by pi.
  constexpr int kAngles = 72;
  double best_angle = 0.0, best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < (initial_normal ? 1 : kAngles); ++k) {
    const double angle = kPi * k / kAngles;
    const double w = worst(build(angle));
    if (w < best) {
      best = w;
      best_angle = angle;
    }
  }
  CurveBundle out = build(best_angle);
  if (strict && best > 1.0 + curvature_slack) {
    for (std::size_t s = 0; s < out.components.size(); ++s) {
      const auto& c = out.components[s];
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (curvature_at(c, i) > 1.0 + curvature_slack) {
          throw Error(ErrorCode::OffsetCurvatureViolation,
                      "offset strand " + std::to_string(s) + " has curvature " + std::to_string(curvature_at(c, i)) +
                          " at vertex " + std::to_string(i),
                      "doubled_core");
        }
      }
    }
  }
  return out;
}

namespace {

// Runs one pipeline step, tagging any domain error with the step's name.
template <class F>
auto staged(const char* stage, F&& step) {
  try {
    return step();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.code(), e.what(), stage);
  }
}

double bundle_curvature(const CurveBundle& b) {
  double k = 0.0;
  for (const auto& c : b.components) k = std::max(k, max_curvature(c));
  return k;
}

void require_tight(const TightenResult& r, double tau, const char* stage) {
  const double k = bundle_curvature(r.final_bundle);
  if (k > 1.0 + kCurvatureSlack || r.max_penetration > 1e-2 * tau) {
    throw Error(ErrorCode::Infeasible,
                "tightening ended with curvature " + std::to_string(k) + " and penetration " +
                    std::to_string(r.max_penetration),
                stage);
  }
}

std::string describe(const char* what, const TightenResult& r) {
  return std::string(what) + ": " + std::to_string(r.iterations) + " iterations, " +
         (r.converged ? "converged" : "iteration cap reached") + ", length " + std::to_string(r.length_history.back());
}

}  // namespace

KnotBuild build_K0(const BuildOptions& options) {
  KnotBuild out;
  const WallPlanes walls{0.0, options.wall_gap};

  const DiscreteCurve seed = staged("overhand_seed", [&] { return open_overhand(options.wall_gap, options.core_points); });
  out.notes.push_back("overhand seed: (2,3) torus-knot arc with vertical leads, " + std::to_string(seed.size()) +
                      " vertices, length " + std::to_string(length(seed)));

  TightenConfig single;
  single.target_thickness = 2.0;
  single.walls = walls;
  single.max_iters = options.single_iters;
  single.seed = options.seed;
  const TightenResult core = staged("tighten_core", [&] { return tighten_open(seed, single); });
  require_tight(core, 2.0, "tighten_core");
  out.tight_core = core.final_curve;
  out.notes.push_back(describe("thickness-2 tightening", core));

  const CurveBundle doubled = staged("double_core", [&] { return doubled_core(out.tight_core, 0.5, false); });
  out.notes.push_back("doubled core: offsets +-0.5 along a rotation-minimizing frame, offset curvature " +
                      std::to_string(bundle_curvature(doubled)) + " before re-tightening");

  TightenConfig pair = single;
  pair.target_thickness = 1.0;
  pair.max_iters = options.double_iters;
  pair.sample_every = options.strand_sample_every;
  const TightenResult strands =
      staged("tighten_strands", [&] { return tighten_open(doubled, pair, options.strand_observer); });
  require_tight(strands, 1.0, "tighten_strands");
  out.doubled = strands.final_bundle;
  out.notes.push_back(describe("thickness-1 tightening of both strands", strands));

  out.capped = staged("cap", [&] { return close_open_curve(out.doubled, cap_junctions(out.doubled), 0.5); });
  out.curve = out.capped.curve;
  out.curve.tube_radius = 0.5;
  out.notes.push_back("caps: top " + std::string(to_string(out.capped.top.word)) + " length " +
                      std::to_string(out.capped.top.total_length) + ", bottom " +
                      std::string(to_string(out.capped.bottom.word)) + " length " +
                      std::to_string(out.capped.bottom.total_length));
  return out;
}

StackBuild build_Kn_from(const KnotBuild& k0, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "stack needs at least one copy");
  if (k0.doubled.components.size() != 2) throw Error(ErrorCode::PreconditionViolated, "K0 has no two-strand core");
  const auto& a = k0.doubled.components[0].points;
  const auto& b = k0.doubled.components[1].points;
  const double bottom_z = a.front().z, top_z = a.back().z;
  const double h = 0.5 * (mean_segment_length(k0.doubled.components[0]) + mean_segment_length(k0.doubled.components[1]));
  // One tube diameter of straight joiner keeps neighbouring copies apart.
  constexpr double kJoiner = 1.0;

  // Copy k+1 is turned about z so its bottom ends sit under copy k's top
  // ends; the ends of both strands are symmetric about the axis, so one turn
  // aligns both.
  const double turn = std::atan2(a.back().y, a.back().x) - std::atan2(a.front().y, a.front().x);
  const Vec3 axis{0, 0, 1};
  const double pitch = (top_z - bottom_z) + kJoiner;

  CurveBundle chains;
  chains.components.resize(2);
  for (std::size_t s = 0; s < 2; ++s) {
    auto& chain = chains.components[s];
    chain.closed = false;
    chain.tube_radius = 0.5;
    const auto& strand = s == 0 ? a : b;
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = turn * static_cast<double>(k);
      const Vec3 lift{0, 0, pitch * static_cast<double>(k)};
      if (k > 0) {
        const Vec3 from = chain.points.back();
        const Vec3 to = rotate(strand.front(), axis, angle) + lift;
        std::vector<Vec3> joiner;
        straight(joiner, from, to, h);
        chain.points.insert(chain.points.end(), joiner.begin() + 1, joiner.end());
      }
      for (const auto& p : strand) chain.points.push_back(rotate(p, axis, angle) + lift);
    }
    // Drop the duplicate left where a joiner meets the next copy.
    chain.points.erase(std::unique(chain.points.begin(), chain.points.end(),
                                   [](const Vec3& x, const Vec3& y) { return distance(x, y) < 1e-12; }),
                       chain.points.end());
  }

  StackBuild out;
  const CappedCurve capped = staged("cap", [&] { return close_open_curve(chains, cap_junctions(chains), 0.5); });
  out.curve = capped.curve;
  out.curve.tube_radius = 0.5;
  out.module_length = length(k0.doubled.components[0]) + length(k0.doubled.components[1]);
  out.joiner_length = 2.0 * kJoiner;
  out.cap_length = capped.top.total_length + capped.bottom.total_length;
  out.notes.push_back(std::to_string(n) + " copies of the doubled core, turned by " + std::to_string(turn) +
                      " rad per copy, joined by vertical tubes of length " + std::to_string(kJoiner));
  out.notes.push_back("caps: top " + std::string(to_string(capped.top.word)) + ", bottom " +
                      std::string(to_string(capped.bottom.word)));
  return out;
}

StackBuild build_Kn(std::size_t n, const BuildOptions& options) {
  return build_Kn_from(build_K0(options), n);
}

}  // namespace thickknot
