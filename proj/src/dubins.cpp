#include "thickknot/dubins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thickknot/errors.hpp"

namespace thickknot {

std::string_view to_string(DubinsWord word) {
  switch (word) {
    case DubinsWord::LRL: return "LRL";
    case DubinsWord::RLR: return "RLR";
    case DubinsWord::LSL: return "LSL";
    case DubinsWord::LSR: return "LSR";
    case DubinsWord::RSL: return "RSL";
    case DubinsWord::RSR: return "RSR";
  }
  return "?";
}

bool is_ccc(DubinsWord word) { return word == DubinsWord::LRL || word == DubinsWord::RLR; }

namespace {

double mod2pi(double a) {
  const double r = std::fmod(a, 2.0 * kPi);
  return r < 0.0 ? r + 2.0 * kPi : r;
}

std::array<int, 3> word_curvatures(DubinsWord w) {
  switch (w) {
    case DubinsWord::LRL: return {1, -1, 1};
    case DubinsWord::RLR: return {-1, 1, -1};
    case DubinsWord::LSL: return {1, 0, 1};
    case DubinsWord::LSR: return {1, 0, -1};
    case DubinsWord::RSL: return {-1, 0, 1};
    case DubinsWord::RSR: return {-1, 0, -1};
  }
  return {0, 0, 0};
}

// Advances a planar pose along a constant-curvature piece.
Pose2 advance(const Pose2& p, int curvature, double len) {
  if (curvature == 0) return {p.x + len * std::cos(p.heading), p.y + len * std::sin(p.heading), p.heading};
  const double k = static_cast<double>(curvature);
  const double h1 = p.heading + k * len;
  return {p.x + (std::sin(h1) - std::sin(p.heading)) / k, p.y - (std::cos(h1) - std::cos(p.heading)) / k, h1};
}

}  // namespace

std::vector<DubinsCandidate> dubins_candidates(const Pose2& start, const Pose2& end) {
  const double dx = end.x - start.x;
  const double dy = end.y - start.y;
  const double d = std::hypot(dx, dy);
  const double phi = d > 0.0 ? std::atan2(dy, dx) : 0.0;
  const double a = mod2pi(start.heading - phi);
  const double b = mod2pi(end.heading - phi);
  const double sa = std::sin(a), sb = std::sin(b), ca = std::cos(a), cb = std::cos(b);
  const double c_ab = std::cos(a - b);

  std::vector<DubinsCandidate> out;
  {  // LRL
    const double tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
    if (std::abs(tmp) <= 1.0) {
      const double ph = std::atan2(ca - cb, d + sa - sb);
      const double p = mod2pi(2.0 * kPi - std::acos(tmp));
      const double t = mod2pi(-a - ph + p / 2.0);
      const double q = mod2pi(mod2pi(b) - a - t + mod2pi(p));
      out.push_back({DubinsWord::LRL, {t, p, q}});
    }
  }
  {  // RLR
    const double tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
    if (std::abs(tmp) <= 1.0) {
      const double ph = std::atan2(ca - cb, d - sa + sb);
      const double p = mod2pi(2.0 * kPi - std::acos(tmp));
      const double t = mod2pi(a - ph + mod2pi(p / 2.0));
      const double q = mod2pi(a - b - t + mod2pi(p));
      out.push_back({DubinsWord::RLR, {t, p, q}});
    }
  }
  {  // LSL
    const double p2 = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
    if (p2 >= 0.0) {
      const double tmp = std::atan2(cb - ca, d + sa - sb);
      out.push_back({DubinsWord::LSL, {mod2pi(-a + tmp), std::sqrt(p2), mod2pi(b - tmp)}});
    }
  }
  {  // LSR
    const double p2 = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
    if (p2 >= 0.0) {
      const double p = std::sqrt(p2);
      const double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
      out.push_back({DubinsWord::LSR, {mod2pi(-a + tmp), p, mod2pi(-mod2pi(b) + tmp)}});
    }
  }
  {  // RSL
    const double p2 = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
    if (p2 >= 0.0) {
      const double p = std::sqrt(p2);
      const double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
      out.push_back({DubinsWord::RSL, {mod2pi(a - tmp), p, mod2pi(b - tmp)}});
    }
  }
  {  // RSR
    const double p2 = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
    if (p2 >= 0.0) {
      const double tmp = std::atan2(ca - cb, d - sa + sb);
      out.push_back({DubinsWord::RSR, {mod2pi(a - tmp), std::sqrt(p2), mod2pi(-b + tmp)}});
    }
  }
  return out;
}

Configuration DubinsPath::sample(double s) const {
  s = std::clamp(s, 0.0, total_length);
  Pose2 pose{};
  for (const auto& seg : segments) {
    pose = {seg.x, seg.y, seg.heading};
    if (s <= seg.length) {
      pose = advance(pose, seg.signed_curvature, s);
      s = 0.0;
      break;
    }
    s -= seg.length;
    pose = advance(pose, seg.signed_curvature, seg.length);
  }
  const Vec3 pos = origin + axis_x * pose.x + axis_y * pose.y;
  const Vec3 tan = axis_x * std::cos(pose.heading) + axis_y * std::sin(pose.heading);
  return {pos, tan};
}

std::vector<Vec3> DubinsPath::sample_points(double spacing) const {
  const auto m = static_cast<std::size_t>(std::max(1.0, std::round(total_length / spacing)));
  std::vector<Vec3> pts;
  pts.reserve(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    pts.push_back(sample(total_length * static_cast<double>(k) / static_cast<double>(m)).position);
  }
  return pts;
}

DubinsPath solve_dubins(const Configuration& start, const Configuration& end) {
  const Vec3 disp = end.position - start.position;
  const double scale = std::max(1.0, norm(disp));
  Vec3 normal = cross(start.tangent, end.tangent);
  if (norm(normal) > 1e-9) {
    normal = normalized(normal);
    if (std::abs(dot(disp, normal)) > 1e-9 * scale) {
      throw Error(ErrorCode::NonPlanarInput, "tangents and displacement are not coplanar");
    }
  } else if (norm(cross(start.tangent, disp)) > 1e-9 * scale) {
    normal = normalized(cross(start.tangent, disp));
  } else {
    normal = any_orthogonal(start.tangent);
  }

  DubinsPath path;
  path.origin = start.position;
  path.axis_x = start.tangent;
  path.normal = normal;
  path.axis_y = normalized(cross(normal, start.tangent));
  const Pose2 from{0.0, 0.0, 0.0};
  const Pose2 to{dot(disp, path.axis_x), dot(disp, path.axis_y),
                 std::atan2(dot(end.tangent, path.axis_y), dot(end.tangent, path.axis_x))};

  const auto candidates = dubins_candidates(from, to);
  if (candidates.empty()) throw Error(ErrorCode::Infeasible, "no Dubins candidate is feasible");
  // Fixed candidate order breaks ties: CCC words precede CSC words.
  const DubinsCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.total() < best->total() - 1e-12) best = &c;
  }

  path.word = best->word;
  const auto curv = word_curvatures(best->word);
  Pose2 pose = from;
  for (int k = 0; k < 3; ++k) {
    DubinsSegment seg;
    seg.kind = curv[k] == 0 ? SegmentKind::Line : SegmentKind::Arc;
    seg.signed_curvature = curv[k];
    seg.length = best->lengths[k];
    seg.x = pose.x;
    seg.y = pose.y;
    seg.heading = pose.heading;
    path.segments.push_back(seg);
    pose = advance(pose, curv[k], seg.length);
  }
  path.total_length = best->total();
  return path;
}

CapJunctions cap_junctions(const CurveBundle& core) {
  if (core.components.size() != 2) {
    throw Error(ErrorCode::PreconditionViolated, "capping needs exactly two strands");
  }
  const auto& a = core.components[0].points;
  const auto& b = core.components[1].points;
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::DegenerateCurve, "strand too short");
  const Vec3 a_start_t = normalized(a[1] - a[0]);
  const Vec3 a_end_t = normalized(a[a.size() - 1] - a[a.size() - 2]);
  const Vec3 b_start_t = normalized(b[1] - b[0]);
  const Vec3 b_end_t = normalized(b[b.size() - 1] - b[b.size() - 2]);
  CapJunctions j;
  j.top = {{a.back(), a_end_t}, {b.back(), -b_end_t}};
  j.bottom = {{b.front(), -b_start_t}, {a.front(), a_start_t}};
  return j;
}

CappedCurve close_open_curve(const CurveBundle& core, const CapJunctions& ends, double tube_radius) {
  const CapJunctions actual = cap_junctions(core);
  auto mismatch = [](const Configuration& x, const Configuration& y) {
    return std::max(distance(x.position, y.position), norm(x.tangent - y.tangent));
  };
  const double worst = std::max({mismatch(actual.top.from, ends.top.from), mismatch(actual.top.to, ends.top.to),
                                 mismatch(actual.bottom.from, ends.bottom.from),
                                 mismatch(actual.bottom.to, ends.bottom.to)});
  if (worst > 1e-6) {
    throw Error(ErrorCode::PreconditionViolated, "strand ends do not match the supplied configurations");
  }

  const auto& a = core.components[0];
  const auto& b = core.components[1];
  const double h = 0.5 * (mean_segment_length(a) + mean_segment_length(b));

  CappedCurve out;
  out.top = solve_dubins(ends.top.from, ends.top.to);
  out.bottom = solve_dubins(ends.bottom.from, ends.bottom.to);

  auto& pts = out.curve.points;
  pts = a.points;
  out.top_begin = pts.size() - 1;
  const auto top_pts = out.top.sample_points(h);
  pts.insert(pts.end(), top_pts.begin() + 1, top_pts.end() - 1);
  out.top_end = pts.size();
  for (auto it = b.points.rbegin(); it != b.points.rend(); ++it) pts.push_back(*it);
  if (out.top.total_length < 1e-12) {
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(out.top_end));
  }
  out.bottom_begin = pts.size() - 1;
  const auto bottom_pts = out.bottom.sample_points(h);
  pts.insert(pts.end(), bottom_pts.begin() + 1, bottom_pts.end() - 1);
  out.bottom_end = 0;  // wraps to the first vertex
  if (out.bottom.total_length < 1e-12) pts.pop_back();
  out.curve.closed = true;
  out.curve.tube_radius = tube_radius;

  const auto top_end_cfg = out.top.end();
  const auto bottom_end_cfg = out.bottom.end();
  out.max_position_mismatch = std::max(distance(top_end_cfg.position, ends.top.to.position),
                                       distance(bottom_end_cfg.position, ends.bottom.to.position));
  out.max_tangent_mismatch = std::max({norm(top_end_cfg.tangent - ends.top.to.tangent),
                                       norm(bottom_end_cfg.tangent - ends.bottom.to.tangent),
                                       norm(out.top.start().tangent - ends.top.from.tangent),
                                       norm(out.bottom.start().tangent - ends.bottom.from.tangent)});

  // Cap vertices against everything else, skipping arc-neighbours.
  const ArcLength arc(out.curve);
  const double window = exclusion_window(tube_radius, mean_segment_length(out.curve));
  const std::size_t n = pts.size();
  auto in_top = [&](std::size_t i) { return i > out.top_begin && i < out.top_end; };
  auto in_bottom = [&](std::size_t i) { return i > out.bottom_begin; };
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_top(i) && !in_bottom(i)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_top(j) || in_bottom(j)) continue;
      if (arc.distance(i, j) < window) continue;
      closest = std::min(closest, distance(pts[i], pts[j]));
    }
  }
  out.min_cap_core_distance = closest;
  if (closest < 2.0 * tube_radius * (1.0 - 1e-3)) {
    throw Error(ErrorCode::CapCollision, "cap passes within " + std::to_string(closest) +
                                             " of the core (tube diameter " +
                                             std::to_string(2.0 * tube_radius) + ")");
  }
  return out;
}

}  // namespace thickknot
