#pragma once

// Slow, independent reference computations used to check the library.
// Nothing here calls into the code under test beyond plain data types.

#include <cstdint>
#include <optional>
#include <vector>

#include "thickknot/curve.hpp"
#include "thickknot/dubins.hpp"

namespace oracles {

using thickknot::DiscreteCurve;
using thickknot::Pose2;
using thickknot::Vec3;

/// Brute-force R2: smallest chord between vertex pairs farther apart along
/// the curve than pi * max(r, h), whose chord is within `orthogonality`
/// (|cos|) of both central-difference tangents. +inf if there is none.
double brute_force_r2(const DiscreteCurve& curve, double orthogonality = 0.1);
inline double brute_force_thickness(const DiscreteCurve& curve, double orthogonality = 0.1) {
  const double r = brute_force_r2(curve, orthogonality);
  return r < 2.0 ? r : 2.0;
}

/// Shortest unit-radius Dubins path length found by scanning the first arc
/// angle on a grid and root-finding the tangency condition of each word
/// (CSC: line tangent to the final circle; CCC: middle circle touching the
/// final circle). Returns nullopt if no word admits a solution.
struct GridDubins {
  double length;
  bool ccc;
};
std::optional<GridDubins> grid_dubins(const Pose2& start, const Pose2& end, double step = 1e-4);

/// Monte-Carlo area of {x in box : inside(x)} with a fixed seed.
template <class Inside>
double monte_carlo_area(double x0, double x1, double y0, double y1, std::size_t samples,
                        Inside inside);

double uniform01(std::uint64_t& state);

/// Monte-Carlo area of the near-contact region in the z = 0 section of a
/// threaded coil: points inside the coil radius and outside the coil's tube
/// whose distance to the whole centreline is below three tube radii.
double threaded_coil_near_contact(const DiscreteCurve& curve, std::size_t strand_end, double coil_radius,
                                  std::size_t samples);

template <class Inside>
double monte_carlo_area(double x0, double x1, double y0, double y1, std::size_t samples,
                        Inside inside) {
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = x0 + (x1 - x0) * uniform01(state);
    const double y = y0 + (y1 - y0) * uniform01(state);
    if (inside(x, y)) ++hits;
  }
  return (x1 - x0) * (y1 - y0) * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace oracles
