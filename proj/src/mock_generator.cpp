#include <cmath>
#include <numbers>

#include "spatialprompt/backend.hpp"

namespace spatialprompt {

namespace {

constexpr int kRingSides = 8;

Vec3 least_aligned_world_axis(const Vec3& t) {
  const Vec3 world[] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(dot(world[i], t)) < std::abs(dot(world[best], t))) best = i;
  return world[best];
}

Vec3 perpendicular_to(const Vec3& t, const Vec3& hint) {
  Vec3 n = hint - t * dot(hint, t);
  if (norm(n) < 1e-9) {
    const Vec3 w = least_aligned_world_axis(t);
    n = w - t * dot(w, t);
  }
  return normalized(n);
}

std::uint32_t add_vertex(TriangleMesh& mesh, const Point3& p) {
  mesh.vertices.push_back(p);
  return static_cast<std::uint32_t>(mesh.vertices.size() - 1);
}

void add_tube(TriangleMesh& mesh, const std::vector<Point3>& samples, double radius) {
  const std::size_t m = samples.size();
  std::vector<Vec3> tangents(m);
  Vec3 last{1, 0, 0};
  for (std::size_t i = 0; i < m; ++i) {
    const Point3& prev = samples[i == 0 ? 0 : i - 1];
    const Point3& next = samples[i + 1 == m ? m - 1 : i + 1];
    Vec3 t = next - prev;
    if (norm(t) < 1e-12) t = last;  // stroke doubles back onto itself here
    tangents[i] = last = normalized(t);
  }

  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  Vec3 normal = perpendicular_to(tangents[0], least_aligned_world_axis(tangents[0]));
  for (std::size_t i = 0; i < m; ++i) {
    normal = perpendicular_to(tangents[i], normal);  // parallel transport
    const Vec3 binormal = cross(tangents[i], normal);
    for (int k = 0; k < kRingSides; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / kRingSides;
      add_vertex(mesh, samples[i] + (normal * std::cos(theta) + binormal * std::sin(theta)) * radius);
    }
  }
  auto ring = [&](std::size_t i, int k) {
    return base + static_cast<std::uint32_t>(i * kRingSides + static_cast<std::size_t>(k % kRingSides));
  };
  for (std::size_t i = 0; i + 1 < m; ++i)
    for (int k = 0; k < kRingSides; ++k) {
      const auto a = ring(i, k), b = ring(i, k + 1), c = ring(i + 1, k + 1), d = ring(i + 1, k);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  const auto start_apex = add_vertex(mesh, samples.front());
  const auto end_apex = add_vertex(mesh, samples.back());
  for (int k = 0; k < kRingSides; ++k) {
    mesh.triangles.push_back({start_apex, ring(0, k + 1), ring(0, k)});
    mesh.triangles.push_back({end_apex, ring(m - 1, k), ring(m - 1, k + 1)});
  }
}

void add_octahedron(TriangleMesh& mesh, const Point3& c, double r) {
  const auto px = add_vertex(mesh, c + Vec3{r, 0, 0});
  const auto nx = add_vertex(mesh, c + Vec3{-r, 0, 0});
  const auto py = add_vertex(mesh, c + Vec3{0, r, 0});
  const auto ny = add_vertex(mesh, c + Vec3{0, -r, 0});
  const auto pz = add_vertex(mesh, c + Vec3{0, 0, r});
  const auto nz = add_vertex(mesh, c + Vec3{0, 0, -r});
  mesh.triangles.push_back({px, py, pz});
  mesh.triangles.push_back({py, nx, pz});
  mesh.triangles.push_back({nx, ny, pz});
  mesh.triangles.push_back({ny, px, pz});
  mesh.triangles.push_back({py, px, nz});
  mesh.triangles.push_back({nx, py, nz});
  mesh.triangles.push_back({ny, nx, nz});
  mesh.triangles.push_back({px, ny, nz});
}

}  // namespace

double mock_tube_radius(const Component& component) {
  return std::max(0.005, 0.03 * component.box.diagonal());
}

TriangleMesh mock_generate(const GenerationRequest& req) {
  const ConstraintSet& cs = req.constraint_set;
  if (cs.components.empty() || cs.scaffold.edges.empty()) throw Error(ErrorCode::EmptyConstraintSet);

  TriangleMesh mesh;
  std::vector<double> node_radius(cs.scaffold.nodes.size(), 0.0);
  for (const auto& edge : cs.scaffold.edges) {
    const Component* c = cs.component_of(edge.stroke_id);
    if (c == nullptr) throw Error(ErrorCode::InvalidConstraintSet, "stroke without component");
    const double r = mock_tube_radius(*c);
    add_tube(mesh, edge.samples, r);
    // Edges are in ascending stroke id; the first incident edge sets the node radius.
    for (std::size_t n : {edge.a, edge.b})
      if (node_radius[n] == 0.0) node_radius[n] = r;
  }
  for (std::size_t n = 0; n < cs.scaffold.nodes.size(); ++n)
    if (node_radius[n] > 0.0) add_octahedron(mesh, cs.scaffold.nodes[n], node_radius[n]);
  return mesh;
}

}  // namespace spatialprompt
