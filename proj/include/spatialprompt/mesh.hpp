#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatialprompt/geometry.hpp"

namespace spatialprompt {

struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;  // 0-based
  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;

  bool empty() const { return triangles.empty(); }
  std::array<Point3, 3> triangle(std::size_t i) const {
    const auto& t = triangles[i];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
};

/// OBJ subset: `v` and `f` (1-based, polygons fan-triangulated from the first
/// index, `a/b/c` references use the position index). Other statements are
/// ignored. Negative indices are rejected. Throws Error{MalformedObj}.
TriangleMesh load_mesh_obj(std::string_view bytes);
std::string export_mesh_obj(const TriangleMesh& mesh);

/// Exact Euclidean distance to the closed triangle; zero-area triangles fall back to edges.
double point_triangle_distance(const Point3& p, const std::array<Point3, 3>& tri);
Point3 closest_point_on_triangle(const Point3& p, const std::array<Point3, 3>& tri);
double point_segment_distance(const Point3& p, const Point3& a, const Point3& b);

/// Bounding volume hierarchy for nearest-triangle distance queries.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriangleMesh& mesh);

  /// Distance from `p` to the nearest triangle of the mesh.
  double distance(const Point3& p) const;

 private:
  struct Node {
    Point3 lo, hi;
    std::uint32_t first = 0;  // leaf: range into order_; inner: left child index
    std::uint32_t count = 0;  // 0 for inner nodes
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t first, std::uint32_t count);

  std::vector<std::array<Point3, 3>> tris_;
  std::vector<Point3> centroids_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace spatialprompt
