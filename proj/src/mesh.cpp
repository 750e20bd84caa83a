#include "thickknot/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "thickknot/errors.hpp"
#include "thickknot/frames.hpp"
#include "thickknot/io.hpp"

namespace thickknot {

TriangleMesh tube_mesh(const DiscreteCurve& curve, int segments) {
  if (!(curve.tube_radius > 0.0)) throw Error(ErrorCode::NoTube, "tube radius is zero");
  if (segments < 3) throw Error(ErrorCode::InvalidArgument, "a tube needs at least 3 segments around");
  validate(curve);
  const FramedCurve frame = rotation_minimizing_frame(curve, std::nullopt, curve.closed);
  const std::size_t n = curve.size();
  const auto m = static_cast<std::size_t>(segments);
  TriangleMesh mesh;
  mesh.vertices.reserve(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& t = frame.tangents[i];
    const Vec3& nn = frame.normals[i];
    const Vec3 b = cross(t, nn);
    for (std::size_t k = 0; k < m; ++k) {
      const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
      mesh.vertices.push_back(curve.points[i] + (nn * std::cos(theta) + b * std::sin(theta)) * curve.tube_radius);
    }
  }
  auto id = [&](std::size_t i, std::size_t k) { return static_cast<std::uint32_t>(i * m + k % m); };
  // The ring angle turns counterclockwise about the tangent, so (a, c, b)
  // faces outward.
  const std::size_t rings = curve.closed ? n : n - 1;
  for (std::size_t i = 0; i < rings; ++i) {
    const std::size_t j = (i + 1) % n;
    for (std::size_t k = 0; k < m; ++k) {
      const auto a = id(i, k), b = id(j, k), c = id(j, k + 1), d = id(i, k + 1);
      mesh.triangles.push_back({a, c, b});
      mesh.triangles.push_back({a, d, c});
    }
  }
  if (!curve.closed) {
    for (std::size_t k = 1; k + 1 < m; ++k) {
      mesh.triangles.push_back({id(0, 0), id(0, k + 1), id(0, k)});
      mesh.triangles.push_back({id(n - 1, 0), id(n - 1, k), id(n - 1, k + 1)});
    }
  }
  return mesh;
}

int euler_characteristic(const TriangleMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  }
  return static_cast<int>(mesh.vertices.size()) - static_cast<int>(edges.size()) +
         static_cast<int>(mesh.triangles.size());
}

bool is_watertight(const TriangleMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    const auto twin = directed.find({edge.second, edge.first});
    if (twin == directed.end() || twin->second != 1) return false;
  }
  return true;
}

std::string to_obj(const TriangleMesh& mesh) {
  std::string out = "# thickknot tube mesh\n";
  char line[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(line, sizeof line, "v %.10g %.10g %.10g\n", v.x, v.y, v.z);
    out += line;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(line, sizeof line, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += line;
  }
  return out;
}

void export_mesh(const DiscreteCurve& curve, int segments, const std::filesystem::path& path) {
  write_text_atomic(path, to_obj(tube_mesh(curve, segments)));
}

}  // namespace thickknot
