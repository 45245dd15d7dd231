#include "spatialprompt/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "spatialprompt/canonical.hpp"
#include "spatialprompt/error.hpp"

namespace spatialprompt {

namespace {

constexpr ErrorCode kObj = ErrorCode::MalformedObj;

std::string_view next_token(std::string_view& line) {
  const auto start = line.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) {
    line = {};
    return {};
  }
  line.remove_prefix(start);
  const auto end = line.find_first_of(" \t\r");
  std::string_view tok = line.substr(0, end);
  line.remove_prefix(end == std::string_view::npos ? line.size() : end);
  return tok;
}

double parse_coordinate(std::string_view tok, std::size_t line_no) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw Error(kObj, "line " + std::to_string(line_no) + ": bad coordinate '" + std::string(tok) + "'");
  return v;
}

std::int64_t parse_index(std::string_view tok, std::size_t line_no) {
  tok = tok.substr(0, tok.find('/'));
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
    throw Error(kObj, "line " + std::to_string(line_no) + ": bad index '" + std::string(tok) + "'");
  if (v <= 0) throw Error(kObj, "line " + std::to_string(line_no) + ": non-positive index");
  return v;
}

}  // namespace

TriangleMesh load_mesh_obj(std::string_view bytes) {
  TriangleMesh mesh;
  std::size_t line_no = 0;
  while (!bytes.empty()) {
    const auto eol = bytes.find('\n');
    std::string_view line = bytes.substr(0, eol);
    bytes.remove_prefix(eol == std::string_view::npos ? bytes.size() : eol + 1);
    ++line_no;

    const std::string_view keyword = next_token(line);
    if (keyword == "v") {
      Point3 p;
      for (int i = 0; i < 3; ++i) {
        const auto tok = next_token(line);
        if (tok.empty()) throw Error(kObj, "line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
        p[i] = parse_coordinate(tok, line_no);
      }
      mesh.vertices.push_back(p);
    } else if (keyword == "f") {
      std::vector<std::int64_t> idx;
      for (auto tok = next_token(line); !tok.empty(); tok = next_token(line))
        idx.push_back(parse_index(tok, line_no));
      if (idx.size() < 3) throw Error(kObj, "line " + std::to_string(line_no) + ": face arity < 3");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)
        mesh.triangles.push_back({static_cast<std::uint32_t>(idx[0] - 1), static_cast<std::uint32_t>(idx[k] - 1),
                                  static_cast<std::uint32_t>(idx[k + 1] - 1)});
      for (auto i : idx)
        if (i > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max()))
          throw Error(kObj, "line " + std::to_string(line_no) + ": index too large");
    }
    // Everything else (comments, vn, vt, o, g, s, usemtl, mtllib, ...) is ignored.
  }
  for (const auto& t : mesh.triangles)
    for (auto i : t)
      if (i >= mesh.vertices.size())
        throw Error(kObj, "face index " + std::to_string(i + 1) + " exceeds vertex count " +
                              std::to_string(mesh.vertices.size()));
  return mesh;
}

std::string export_mesh_obj(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.triangles.size() * 24);
  for (const auto& v : mesh.vertices) {
    out += "v ";
    out += format_shortest(v.x);
    out += ' ';
    out += format_shortest(v.y);
    out += ' ';
    out += format_shortest(v.z);
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    out += "f ";
    out += std::to_string(t[0] + 1);
    out += ' ';
    out += std::to_string(t[1] + 1);
    out += ' ';
    out += std::to_string(t[2] + 1);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distances

double point_segment_distance(const Point3& p, const Point3& a, const Point3& b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return spatialprompt::distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return spatialprompt::distance(p, a + ab * t);
}

namespace {

Point3 closest_on_segment(const Point3& p, const Point3& a, const Point3& b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return a;
  return a + ab * std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

}  // namespace

Point3 closest_point_on_triangle(const Point3& p, const std::array<Point3, 3>& tri) {
  const auto& [a, b, c] = tri;
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 n = cross(ab, ac);
  const double scale = std::max({dot(ab, ab), dot(ac, ac), dot(c - b, c - b)});
  if (dot(n, n) <= 1e-24 * scale * scale) {
    // Zero-area: nearest of the three edges.
    Point3 best = closest_on_segment(p, a, b);
    for (const auto& cand : {closest_on_segment(p, b, c), closest_on_segment(p, c, a)})
      if (squared_distance(p, cand) < squared_distance(p, best)) best = cand;
    return best;
  }

  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_distance(const Point3& p, const std::array<Point3, 3>& tri) {
  return spatialprompt::distance(p, closest_point_on_triangle(p, tri));
}

// ---------------------------------------------------------------------------
// BVH

namespace {

constexpr std::uint32_t kLeafSize = 8;

double box_distance2(const Point3& p, const Point3& lo, const Point3& hi) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double v = p[i] < lo[i] ? lo[i] - p[i] : (p[i] > hi[i] ? p[i] - hi[i] : 0.0);
    d2 += v * v;
  }
  return d2;
}

}  // namespace

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) {
  tris_.reserve(mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) tris_.push_back(mesh.triangle(i));
  for (const auto& t : tris_) centroids_.push_back((t[0] + t[1] + t[2]) * (1.0 / 3.0));
  order_.resize(tris_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!tris_.empty()) build(0, static_cast<std::uint32_t>(tris_.size()));
}

std::uint32_t TriangleBvh::build(std::uint32_t first, std::uint32_t count) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Point3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  Point3 hi = -lo;
  Point3 clo = lo, chi = hi;
  for (std::uint32_t k = first; k < first + count; ++k) {
    for (const auto& v : tris_[order_[k]])
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
    const auto& c = centroids_[order_[k]];
    for (int i = 0; i < 3; ++i) {
      clo[i] = std::min(clo[i], c[i]);
      chi[i] = std::max(chi[i], c[i]);
    }
  }
  nodes_[index].lo = lo;
  nodes_[index].hi = hi;
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (chi[i] - clo[i] > chi[axis] - clo[axis]) axis = i;
  const std::uint32_t half = count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + first + half, order_.begin() + first + count,
                   [&](std::uint32_t x, std::uint32_t y) { return centroids_[x][axis] < centroids_[y][axis]; });
  const std::uint32_t left = build(first, half);
  const std::uint32_t right = build(first + half, count - half);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

double TriangleBvh::distance(const Point3& p) const {
  if (nodes_.empty()) return std::numeric_limits<double>::infinity();
  double best2 = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance2(p, node.lo, node.hi) >= best2) continue;
    if (node.count > 0) {
      for (std::uint32_t k = node.first; k < node.first + node.count; ++k)
        best2 = std::min(best2, squared_distance(p, closest_point_on_triangle(p, tris_[order_[k]])));
      continue;
    }
    const Node& l = nodes_[node.first];
    const Node& r = nodes_[node.right];
    const double dl = box_distance2(p, l.lo, l.hi);
    const double dr = box_distance2(p, r.lo, r.hi);
    // Push the farther child first so the nearer one is explored first.
    if (dl < dr) {
      stack.push_back(node.right);
      stack.push_back(node.first);
    } else {
      stack.push_back(node.first);
      stack.push_back(node.right);
    }
  }
  return std::sqrt(best2);
}

}  // namespace spatialprompt
