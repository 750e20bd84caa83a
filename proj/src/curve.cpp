#include "thickknot/curve.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "thickknot/errors.hpp"
#include "thickknot/kernels.hpp"

namespace thickknot {

std::size_t CurveBundle::total_points() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.size();
  return n;
}

Configuration Configuration::make(const Vec3& position, const Vec3& tangent) {
  const double n = norm(tangent);
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "configuration tangent is zero");
  return {position, tangent / n};
}

void validate(const DiscreteCurve& curve) {
  const std::size_t min_points = curve.closed ? 8 : 2;
  if (curve.size() < min_points) {
    throw Error(ErrorCode::DegenerateCurve,
                "curve has " + std::to_string(curve.size()) + " points, needs " +
                    std::to_string(min_points));
  }
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    if (!(norm2(curve.segment(i)) > 0.0)) {
      throw Error(ErrorCode::DegenerateCurve,
                  "repeated consecutive point at index " + std::to_string(i));
    }
  }
  if (!(curve.tube_radius >= 0.0 && curve.tube_radius <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tube radius outside [0, 1]");
  }
}

std::vector<double> segment_lengths(const DiscreteCurve& curve) {
  std::vector<double> out(curve.segment_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = norm(curve.segment(i));
  return out;
}

double length(const DiscreteCurve& curve) {
  double total = 0.0;
  for (double l : segment_lengths(curve)) total += l;
  return total;
}

double mean_segment_length(const DiscreteCurve& curve) {
  const std::size_t m = curve.segment_count();
  return m == 0 ? 0.0 : length(curve) / static_cast<double>(m);
}

double diameter(const DiscreteCurve& curve) {
  const PointsSoA soa(curve.points);
  const auto& k = kernels::active();
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    best = std::max(best, k.max_distance2(curve.points[i], soa, i + 1, curve.size()));
  }
  return std::sqrt(best);
}

ArcLength::ArcLength(const DiscreteCurve& curve) : closed(curve.closed) {
  s.resize(curve.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    s[i] = acc;
    if (i + 1 < curve.size()) acc += norm(curve.points[i + 1] - curve.points[i]);
  }
  if (curve.closed && curve.size() > 1) acc += norm(curve.points.front() - curve.points.back());
  total = acc;
}

double ArcLength::distance(std::size_t i, std::size_t j) const {
  const double d = std::abs(s[i] - s[j]);
  return closed ? std::min(d, total - d) : d;
}

std::vector<Vec3> vertex_tangents(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  std::vector<Vec3> t(n);
  if (n < 2) return t;
  for (std::size_t i = 0; i < n; ++i) {
    if (curve.closed) {
      t[i] = normalized(curve.points[(i + 1) % n] - curve.points[(i + n - 1) % n]);
    } else if (i == 0) {
      t[i] = normalized(curve.points[1] - curve.points[0]);
    } else if (i + 1 == n) {
      t[i] = normalized(curve.points[n - 1] - curve.points[n - 2]);
    } else {
      t[i] = normalized(curve.points[i + 1] - curve.points[i - 1]);
    }
  }
  return t;
}

double curvature_at(const DiscreteCurve& curve, std::size_t i) {
  const std::size_t n = curve.size();
  if (n < 3) return 0.0;
  if (!curve.closed && (i == 0 || i + 1 == n)) return 0.0;
  const Vec3& prev = curve.points[(i + n - 1) % n];
  const Vec3& next = curve.points[(i + 1) % n];
  const Vec3 e1 = curve.points[i] - prev;
  const Vec3 e2 = next - curve.points[i];
  const double mean_len = 0.5 * (norm(e1) + norm(e2));
  if (!(mean_len > 0.0)) return 0.0;
  return 2.0 * std::sin(0.5 * angle_between(e1, e2)) / mean_len;
}

std::vector<double> discrete_curvature(const DiscreteCurve& curve) {
  std::vector<double> out;
  const std::size_t n = curve.size();
  if (curve.closed) {
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(curvature_at(curve, i));
  } else if (n >= 3) {
    out.reserve(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) out.push_back(curvature_at(curve, i));
  }
  return out;
}

double max_curvature(const DiscreteCurve& curve) {
  double best = 0.0;
  for (double k : discrete_curvature(curve)) best = std::max(best, k);
  return best;
}

namespace {

// One pass of uniform arc-length placement along the current polyline.
std::vector<Vec3> place_uniform(const DiscreteCurve& curve, std::size_t n) {
  const ArcLength arc(curve);
  const std::size_t m = curve.size();
  std::vector<Vec3> out;
  out.reserve(n);
  const double step = curve.closed ? arc.total / static_cast<double>(n)
                                   : arc.total / static_cast<double>(n - 1);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = step * static_cast<double>(k);
    if (!curve.closed && k + 1 == n) {
      out.push_back(curve.points.back());
      break;
    }
    // Advance to the segment containing the target arc length.
    while (seg + 1 < curve.segment_count()) {
      const double seg_end = seg + 1 < m ? arc.s[seg + 1] : arc.total;
      if (seg_end > target) break;
      ++seg;
    }
    const double seg_start = arc.s[seg];
    const double seg_end = seg + 1 < m ? arc.s[seg + 1] : arc.total;
    const double span = seg_end - seg_start;
    const double t = span > 0.0 ? std::clamp((target - seg_start) / span, 0.0, 1.0) : 0.0;
    out.push_back(lerp(curve.points[seg], curve.points[(seg + 1) % m], t));
  }
  return out;
}

double relative_spread(const DiscreteCurve& curve) {
  const auto lens = segment_lengths(curve);
  if (lens.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(lens.begin(), lens.end());
  const double mean = length(curve) / static_cast<double>(lens.size());
  return mean > 0.0 ? (*hi - *lo) / mean : 0.0;
}

}  // namespace

DiscreteCurve resample(const DiscreteCurve& curve, std::size_t n) {
  if (curve.closed && n < 8) throw Error(ErrorCode::InvalidArgument, "closed resample needs n >= 8");
  if (!curve.closed && n < 2) throw Error(ErrorCode::InvalidArgument, "open resample needs n >= 2");
  if (curve.size() < 2 || !(length(curve) > 0.0)) {
    throw Error(ErrorCode::DegenerateCurve, "cannot resample a curve of zero length");
  }
  DiscreteCurve out{place_uniform(curve, n), curve.closed, curve.tube_radius};
  constexpr int kMaxPasses = 200;
  constexpr double kSpreadTolerance = 1e-13;
  for (int pass = 0; pass < kMaxPasses && relative_spread(out) > kSpreadTolerance; ++pass) {
    DiscreteCurve next{place_uniform(out, n), curve.closed, curve.tube_radius};
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, distance(next.points[i], out.points[i]));
    out = std::move(next);
    if (moved < 1e-15) break;
  }
  return out;
}

DiscreteCurve resample_once(const DiscreteCurve& curve, std::size_t n) {
  if (n < 2 || (curve.closed && n < 8)) throw Error(ErrorCode::InvalidArgument, "resample size too small");
  if (curve.size() < 2 || !(length(curve) > 0.0)) {
    throw Error(ErrorCode::DegenerateCurve, "cannot resample a curve of zero length");
  }
  return DiscreteCurve{place_uniform(curve, n), curve.closed, curve.tube_radius};
}

DiscreteCurve perturb(const DiscreteCurve& curve, double amplitude, std::uint64_t seed) {
  if (amplitude < 0.0) throw Error(ErrorCode::InvalidArgument, "negative perturbation amplitude");
  if (amplitude == 0.0) return curve;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  constexpr int kModes = 4;
  std::vector<Vec3> cos_coeff(kModes), sin_coeff(kModes);
  for (int k = 0; k < kModes; ++k) {
    const double weight = 1.0 / static_cast<double>((k + 1) * (k + 1));
    cos_coeff[k] = Vec3{uniform(rng), uniform(rng), uniform(rng)} * weight;
    sin_coeff[k] = Vec3{uniform(rng), uniform(rng), uniform(rng)} * weight;
  }
  const ArcLength arc(curve);
  std::vector<Vec3> disp(curve.size());
  double largest = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double u = arc.total > 0.0 ? arc.s[i] / arc.total : 0.0;
    Vec3 d;
    for (int k = 0; k < kModes; ++k) {
      // Closed curves use full periods; open curves use half periods under an
      // envelope that pins the ends and their tangents.
      const double freq = curve.closed ? 2.0 * kPi * (k + 1) : kPi * (k + 1);
      d += cos_coeff[k] * std::cos(freq * u) + sin_coeff[k] * std::sin(freq * u);
    }
    if (!curve.closed) {
      const double env = std::sin(kPi * u);
      d *= env * env;
    }
    disp[i] = d;
    largest = std::max(largest, norm(d));
  }
  if (!(largest > 0.0)) return curve;
  // Resampling slides points along the displaced curve, so the per-vertex
  // displacement can exceed the raw field; shrink the field until it fits.
  double scale = 0.99 * amplitude / largest;
  for (;;) {
    DiscreteCurve moved = curve;
    for (std::size_t i = 0; i < curve.size(); ++i) moved.points[i] += disp[i] * scale;
    DiscreteCurve out = resample(moved, curve.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) worst = std::max(worst, distance(out.points[i], curve.points[i]));
    if (worst <= amplitude) return out;
    scale *= 0.99 * amplitude / worst;
  }
}

double exclusion_window(double tube_radius, double segment_length) {
  constexpr double kSlack = 0.995;
  return kSlack * kPi * std::max(tube_radius, segment_length);
}

Vec3 centroid(const DiscreteCurve& curve) {
  Vec3 c;
  for (const Vec3& p : curve.points) c += p;
  return curve.size() ? c / static_cast<double>(curve.size()) : c;
}

DiscreteCurve scaled(const DiscreteCurve& curve, double scale, const Vec3& center) {
  DiscreteCurve out = curve;
  for (Vec3& p : out.points) p = center + (p - center) * scale;
  return out;
}

}  // namespace thickknot
