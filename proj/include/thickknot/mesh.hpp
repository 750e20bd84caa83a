#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "thickknot/curve.hpp"

namespace thickknot {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;  // counterclockwise seen from outside
};

/// Tube of the curve's radius swept along a rotation-minimizing frame, one
/// ring of `segments` vertices per curve point. Closed curves give a torus;
/// open curves get a triangle fan over each end ring, so no vertices are
/// added. Throws NoTube for a zero radius.
TriangleMesh tube_mesh(const DiscreteCurve& curve, int segments);

int euler_characteristic(const TriangleMesh& mesh);

/// Every edge shared by exactly two triangles that traverse it in opposite
/// directions.
bool is_watertight(const TriangleMesh& mesh);

/// Wavefront OBJ text with 1-based indices.
std::string to_obj(const TriangleMesh& mesh);

void export_mesh(const DiscreteCurve& curve, int segments, const std::filesystem::path& path);

}  // namespace thickknot
