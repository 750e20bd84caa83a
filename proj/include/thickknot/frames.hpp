#pragma once

#include <optional>
#include <vector>

#include "thickknot/curve.hpp"

namespace thickknot {

/// A curve with a twist-free unit normal field.
struct FramedCurve {
  DiscreteCurve base;
  std::vector<Vec3> tangents;
  std::vector<Vec3> normals;
};

/// Rotation-minimizing frame by double reflection along the polyline.
/// `initial_normal` is projected off the first tangent; when absent a
/// deterministic perpendicular is used. For closed curves the frame does not
/// close up in general; `distribute_holonomy` spreads the closing rotation
/// uniformly so the normal field is continuous around the loop.
FramedCurve rotation_minimizing_frame(const DiscreteCurve& curve,
                                      std::optional<Vec3> initial_normal = std::nullopt,
                                      bool distribute_holonomy = false);

}  // namespace thickknot
