#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <exception>

#include "thickknot/diagnostics.hpp"
#include "thickknot/errors.hpp"
#include "thickknot/parallel.hpp"

namespace thickknot {

bool IndexRange::contains(std::size_t i, std::size_t n) const {
  if (n == 0) return false;
  i %= n;
  return begin <= end ? (i >= begin && i <= end) : (i >= begin || i <= end);
}

void validate(const IsotopyTrace& trace) {
  for (const auto& f : trace.frames) {
    const auto& first = trace.frames.front().curve;
    if (f.curve.closed != first.closed || f.curve.tube_radius != first.tube_radius) {
      throw Error(ErrorCode::InvalidArgument, "trace frames disagree on closed flag or tube radius");
    }
  }
}

double cone_angle(const std::vector<Vec3>& contour, const Vec3& tip) {
  std::vector<Vec3> dirs;
  dirs.reserve(contour.size());
  for (const auto& x : contour) {
    if (distance(x, tip) > 0.0) dirs.push_back(normalized(x - tip));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = i + 1; j < dirs.size(); ++j) best = std::max(best, angle_between(dirs[i], dirs[j]));
  }
  return best;
}

namespace {

struct Seg {
  Vec3 a, b;
};

double distance_to(const std::vector<Seg>& segs, const Vec3& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segs) best = std::min(best, point_segment_distance(q, s.a, s.b));
  return best;
}

// Lazily evaluated square grid in the plane, centred on `origin`.
class PlaneGrid {
 public:
  PlaneGrid(const Plane& plane, const Vec3& origin, double spacing, int half)
      : origin_(origin), g_(spacing), half_(half), side_(2 * half + 1) {
    u_ = any_orthogonal(plane.normal);
    v_ = cross(plane.normal, u_);
  }

  int side() const { return side_; }
  int half() const { return half_; }
  double spacing() const { return g_; }
  bool in_range(int ix, int iy) const { return std::abs(ix) <= half_ && std::abs(iy) <= half_; }
  bool on_border(int ix, int iy) const { return std::abs(ix) == half_ || std::abs(iy) == half_; }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy + half_) * static_cast<std::size_t>(side_) + static_cast<std::size_t>(ix + half_);
  }
  Vec3 at(double ix, double iy) const { return origin_ + u_ * (ix * g_) + v_ * (iy * g_); }

 private:
  Vec3 origin_, u_, v_;
  double g_;
  int half_, side_;
};

// Half-width limit of the search window, in tube radii.
constexpr double kDefaultWindow = 12.0;

constexpr std::array<std::array<int, 2>, 4> kFour{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
// Clockwise ring starting west.
constexpr std::array<std::array<int, 2>, 8> kRing{{{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

class ApertureFinder {
 public:
  ApertureFinder(const DiscreteCurve& curve, const IndexRange& range, const Plane& plane, const ApertureOptions& opt)
      : curve_(curve), range_(range), plane_(plane) {
    const std::size_t n = curve.size();
    if (n < 2) throw Error(ErrorCode::DegenerateCurve, "curve too short for an aperture");
    if (range.begin >= n || range.end >= n) throw Error(ErrorCode::InvalidArgument, "long arc range out of bounds");
    if (!(curve.tube_radius > 0.0)) throw Error(ErrorCode::NoTube, "aperture needs a positive tube radius");
    if (!(std::abs(norm(plane.normal) - 1.0) < 1e-9)) {
      throw Error(ErrorCode::InvalidArgument, "plane normal must be a unit vector");
    }
    r_ = curve.tube_radius;
    tau_ = 2.0 * r_;
    h_ = mean_segment_length(curve);
    max_window_ = opt.max_window > 0.0 ? opt.max_window : std::min(diameter(curve), kDefaultWindow * r_);
    const std::size_t m = curve.closed ? n : n - 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (i + 1) % n;
      const Vec3 &a = curve.points[i], &b = curve.points[j];
      const double da = plane.signed_distance(a), db = plane.signed_distance(b);
      const bool crosses = (da > 0.0) != (db > 0.0);
      const double gap = crosses ? 0.0 : std::min(std::abs(da), std::abs(db));
      const bool in_arc = range.contains(i, n) && range.contains(j, n);
      if (in_arc && crosses) crossings_.push_back(lerp(a, b, da / (da - db)));
      if (!in_arc && gap <= r_) rest_.push_back({a, b});
      if (gap <= r_ + tau_) near_.push_back({a, b});
    }
    if (crossings_.empty()) throw Error(ErrorCode::PreconditionViolated, "long arc does not cross the plane");
    std::stable_sort(crossings_.begin(), crossings_.end(), [&](const Vec3& x, const Vec3& y) {
      return distance2(x, plane.point) < distance2(y, plane.point);
    });
  }

  ApertureTriple run() {
    for (const auto& passage : crossings_) {
      if (!(distance_to(rest_, passage) > r_)) continue;  // threads through the tube itself
      for (double w = 4.0 * r_; ; w *= 2.0) {
        const double half_width = std::min(w, max_window_);
        if (auto found = try_window(passage, half_width)) return *found;
        if (half_width >= max_window_) break;
      }
    }
    throw Error(ErrorCode::NoAperture, "no crossing of the long arc lies in a bounded hole of the plane section");
  }

 private:
  std::optional<ApertureTriple> try_window(const Vec3& passage, double half_width) {
    const double g = 0.5 * h_;
    PlaneGrid grid(plane_, passage, g, static_cast<int>(std::ceil(half_width / g)));
    const std::size_t cells = static_cast<std::size_t>(grid.side()) * static_cast<std::size_t>(grid.side());
    std::vector<std::int8_t> free_state(cells, -1);
    auto is_free = [&](int ix, int iy) {
      auto& s = free_state[grid.index(ix, iy)];
      if (s < 0) s = distance_to(rest_, grid.at(ix, iy)) > r_ ? 1 : 0;
      return s == 1;
    };

    // Free cells reachable from the passage.
    std::vector<std::uint8_t> fill(cells, 0);
    std::deque<std::array<int, 2>> queue{{0, 0}};
    fill[grid.index(0, 0)] = 1;
    while (!queue.empty()) {
      const auto [x, y] = queue.front();
      queue.pop_front();
      if (grid.on_border(x, y)) return std::nullopt;
      for (const auto& d : kFour) {
        const int nx = x + d[0], ny = y + d[1];
        if (fill[grid.index(nx, ny)] || !is_free(nx, ny)) continue;
        fill[grid.index(nx, ny)] = 1;
        queue.push_back({nx, ny});
      }
    }

    // Everything the border reaches without entering the fill is outside;
    // the rest is the disk, islands included.
    std::vector<std::uint8_t> outside(cells, 0);
    const int H = grid.half();
    for (int k = -H; k <= H; ++k) {
      for (const auto& c : {std::array<int, 2>{k, -H}, {k, H}, {-H, k}, {H, k}}) {
        if (!fill[grid.index(c[0], c[1])] && !outside[grid.index(c[0], c[1])]) {
          outside[grid.index(c[0], c[1])] = 1;
          queue.push_back(c);
        }
      }
    }
    while (!queue.empty()) {
      const auto [x, y] = queue.front();
      queue.pop_front();
      for (const auto& d : kFour) {
        const int nx = x + d[0], ny = y + d[1];
        if (!grid.in_range(nx, ny)) continue;
        const std::size_t id = grid.index(nx, ny);
        if (fill[id] || outside[id]) continue;
        outside[id] = 1;
        queue.push_back({nx, ny});
      }
    }
    auto in_disk = [&](int ix, int iy) { return grid.in_range(ix, iy) && !outside[grid.index(ix, iy)]; };

    ApertureTriple out;
    out.plane = plane_;
    out.grid_spacing = g;
    out.passage = passage;
    std::size_t disk_cells = 0, near_cells = 0;
    std::array<int, 2> start{0, 0};
    bool have_start = false;
    for (int iy = -H; iy <= H; ++iy) {
      for (int ix = -H; ix <= H; ++ix) {
        if (!in_disk(ix, iy)) continue;
        if (!have_start) {
          start = {ix, iy};
          have_start = true;
        }
        ++disk_cells;
        if (distance_to(near_, grid.at(ix, iy)) - r_ < tau_) ++near_cells;
      }
    }
    out.disk_area = static_cast<double>(disk_cells) * g * g;
    out.near_contact_area = static_cast<double>(near_cells) * g * g;

    for (const auto& cell : trace_boundary(in_disk, start, disk_cells)) {
      out.contour.push_back(surface_point(grid, cell, in_disk));
    }
    for (std::size_t i = 0; i < out.contour.size(); ++i) {
      for (std::size_t j = i + 1; j < out.contour.size(); ++j) {
        out.disk_diameter = std::max(out.disk_diameter, distance(out.contour[i], out.contour[j]));
      }
    }
    out.tip = farthest_arc_point();
    out.cone_angle = cone_angle(out.contour, out.tip);
    return out;
  }

  // Moore-neighbour tracing; stops when the first step out of the start cell
  // is about to repeat.
  template <typename Inside>
  static std::vector<std::array<int, 2>> trace_boundary(const Inside& inside, std::array<int, 2> start,
                                                        std::size_t cells) {
    std::vector<std::array<int, 2>> path{start};
    std::array<int, 2> cur = start, back{start[0] - 1, start[1]};
    std::optional<std::array<int, 2>> second;
    for (std::size_t guard = 0; guard < 4 * cells + 8; ++guard) {
      int from = 0;
      for (int k = 0; k < 8; ++k) {
        if (cur[0] + kRing[k][0] == back[0] && cur[1] + kRing[k][1] == back[1]) from = k;
      }
      std::optional<std::array<int, 2>> next;
      for (int k = 1; k <= 8 && !next; ++k) {
        const int idx = (from + k) % 8;
        const std::array<int, 2> cand{cur[0] + kRing[idx][0], cur[1] + kRing[idx][1]};
        if (inside(cand[0], cand[1])) {
          const int prev = (idx + 7) % 8;
          back = {cur[0] + kRing[prev][0], cur[1] + kRing[prev][1]};
          next = cand;
        }
      }
      if (!next) break;  // single cell
      if (cur == start) {
        if (second && *next == *second) break;
        if (!second) second = next;
      }
      cur = *next;
      if (cur != start) path.push_back(cur);
    }
    return path;
  }

  // Moves a boundary cell centre onto the tube surface by bisecting towards
  // a neighbouring cell inside the tube.
  template <typename Inside>
  Vec3 surface_point(const PlaneGrid& grid, const std::array<int, 2>& cell, const Inside& in_disk) const {
    const Vec3 a = grid.at(cell[0], cell[1]);
    for (const auto& d : kRing) {
      const int nx = cell[0] + d[0], ny = cell[1] + d[1];
      if (in_disk(nx, ny)) continue;
      Vec3 lo = a, hi = grid.at(nx, ny);
      if (distance_to(rest_, hi) > r_) continue;
      for (int it = 0; it < 40; ++it) {
        const Vec3 mid = (lo + hi) * 0.5;
        (distance_to(rest_, mid) > r_ ? lo : hi) = mid;
      }
      return (lo + hi) * 0.5;
    }
    return a;
  }

  Vec3 farthest_arc_point() const {
    const std::size_t n = curve_.size();
    Vec3 best = curve_.points[range_.begin];
    double far = -1.0;
    for (std::size_t i = range_.begin;; i = (i + 1) % n) {
      const double d = std::abs(plane_.signed_distance(curve_.points[i]));
      if (d > far) {
        far = d;
        best = curve_.points[i];
      }
      if (i == range_.end) break;
    }
    return best;
  }

  const DiscreteCurve& curve_;
  IndexRange range_;
  Plane plane_;
  double r_ = 0.0, tau_ = 0.0, h_ = 0.0, max_window_ = 0.0;
  std::vector<Vec3> crossings_;
  std::vector<Seg> rest_;  // the tube that can bound the disk
  std::vector<Seg> near_;  // every segment that can be within reach of the plane
};

std::vector<std::size_t> range_indices(const IndexRange& range, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = range.begin;; i = (i + 1) % n) {
    out.push_back(i);
    if (i == range.end || out.size() > n) break;
  }
  return out;
}

}  // namespace

ApertureTriple extract_aperture(const DiscreteCurve& curve, const IndexRange& long_arc, const Plane& plane,
                                const ApertureOptions& options) {
  return ApertureFinder(curve, long_arc, plane, options).run();
}

std::optional<Plane> find_aperture_plane(const DiscreteCurve& curve, const IndexRange& long_arc) {
  const std::size_t n = curve.size();
  if (long_arc.begin >= n || long_arc.end >= n) throw Error(ErrorCode::InvalidArgument, "long arc range out of bounds");
  const auto tangents = vertex_tangents(curve);
  const auto indices = range_indices(long_arc, n);
  const std::size_t stride = std::max<std::size_t>(1, indices.size() / 64);
  std::optional<Plane> best;
  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t k = stride / 2; k < indices.size(); k += stride) {
    const std::size_t i = indices[k];
    const Plane plane{curve.points[i], normalized(tangents[i])};
    try {
      const auto ap = extract_aperture(curve, long_arc, plane);
      if (ap.disk_area < best_area) {
        best_area = ap.disk_area;
        best = plane;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAperture && e.code() != ErrorCode::PreconditionViolated) throw;
    }
  }
  return best;
}

std::optional<ApertureHint> find_aperture_hint(const DiscreteCurve& curve, double arc_half_length) {
  if (!(curve.tube_radius > 0.0)) throw Error(ErrorCode::NoTube, "aperture needs a positive tube radius");
  const std::size_t n = curve.size();
  const double r = curve.tube_radius, h = mean_segment_length(curve);
  const double half = arc_half_length > 0.0 ? arc_half_length : 4.0 * r;
  const auto w = static_cast<std::size_t>(std::ceil(half / h));
  if (2 * w + 1 >= n) return std::nullopt;
  const auto tangents = vertex_tangents(curve);
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.5 * r / h)));
  const std::size_t first = curve.closed ? 0 : w, last = curve.closed ? n : n - w;
  std::vector<std::size_t> centres;
  for (std::size_t i = first; i < last; i += stride) centres.push_back(i);
  auto hint_at = [&](std::size_t i) {
    return ApertureHint{{(i + n - w) % n, (i + w) % n}, {curve.points[i], normalized(tangents[i])}};
  };
  std::vector<double> areas(centres.size(), std::numeric_limits<double>::infinity());
  std::vector<std::exception_ptr> failures(centres.size());
  parallel_chunks(centres.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto hint = hint_at(centres[k]);
      try {
        areas[k] = extract_aperture(curve, hint.long_arc, hint.plane).disk_area;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoAperture && e.code() != ErrorCode::PreconditionViolated) {
          failures[k] = std::current_exception();
        }
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  }, thread_count());
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  // First minimum in scan order, so the answer does not depend on threads.
  const auto it = std::min_element(areas.begin(), areas.end());
  if (it == areas.end() || !std::isfinite(*it)) return std::nullopt;
  return hint_at(centres[static_cast<std::size_t>(it - areas.begin())]);
}

namespace {

// Local re-fits tried when the previous plane stops working, nearest first.
std::vector<Plane> nearby_planes(const DiscreteCurve& curve, const IndexRange& range, const Plane& plane,
                                 const std::optional<Vec3>& passage) {
  std::vector<Plane> out{plane};
  const std::size_t n = curve.size();
  if (passage) {
    const auto tangents = vertex_tangents(curve);
    std::size_t nearest = range.begin;
    for (std::size_t i : range_indices(range, n)) {
      if (distance2(curve.points[i], *passage) < distance2(curve.points[nearest], *passage)) nearest = i;
    }
    out.push_back({curve.points[nearest], normalized(tangents[nearest])});
  }
  const double h = mean_segment_length(curve);
  for (double k : {1.0, 2.0, 4.0, 8.0}) {
    out.push_back({plane.point + plane.normal * (k * h), plane.normal});
    out.push_back({plane.point - plane.normal * (k * h), plane.normal});
  }
  const Vec3 u = any_orthogonal(plane.normal), v = cross(plane.normal, u);
  for (double angle : {0.05, 0.1, 0.2, 0.4}) {
    for (const Vec3& axis : {u, v}) {
      out.push_back({plane.point, normalized(rotate(plane.normal, axis, angle))});
      out.push_back({plane.point, normalized(rotate(plane.normal, axis, -angle))});
    }
  }
  return out;
}

}  // namespace

PersistenceReport trace_diagnostics(const IsotopyTrace& trace, const IndexRange& long_arc, const Plane& plane) {
  if (trace.frames.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no frames");
  validate(trace);
  PersistenceReport report;
  report.frames = trace.frames.size();
  Plane current = plane;
  std::optional<Vec3> passage;
  for (std::size_t f = 0; f < trace.frames.size(); ++f) {
    const auto& curve = trace.frames[f].curve;
    std::optional<ApertureTriple> found;
    if (long_arc.begin < curve.size() && long_arc.end < curve.size()) {
      for (const auto& candidate : nearby_planes(curve, long_arc, current, passage)) {
        try {
          found = extract_aperture(curve, long_arc, candidate);
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoAperture && e.code() != ErrorCode::PreconditionViolated) throw;
        }
      }
    }
    if (!found) {
      report.lost_frames.push_back(f);
      continue;
    }
    current = found->plane;
    passage = found->passage;
    report.apertures.push_back(std::move(*found));
  }
  if (!report.apertures.empty()) {
    report.min_disk_diameter = report.min_near_contact_area = report.min_cone_angle =
        std::numeric_limits<double>::infinity();
    for (const auto& a : report.apertures) {
      report.min_disk_diameter = std::min(report.min_disk_diameter, a.disk_diameter);
      report.min_near_contact_area = std::min(report.min_near_contact_area, a.near_contact_area);
      report.min_cone_angle = std::min(report.min_cone_angle, a.cone_angle);
    }
  }
  return report;
}

}  // namespace thickknot
