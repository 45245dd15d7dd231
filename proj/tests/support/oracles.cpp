#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sptest {

using namespace spatialprompt;

ComponentSets brute_force_components(const SketchDocument& doc, double epsilon) {
  std::vector<std::string> ids;
  std::vector<Point3> ends;  // 2 per stroke
  for (const auto& [id, s] : doc.strokes) {
    ids.push_back(id);
    ends.push_back(s.points.front() * doc.calibration_scale);
    ends.push_back(s.points.back() * doc.calibration_scale);
  }
  const std::size_t n = ids.size();
  // Stroke adjacency: shared endpoint cluster means touching endpoints.
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (std::size_t a = 0; a < ends.size(); ++a)
    for (std::size_t b = 0; b < ends.size(); ++b)
      if (distance(ends[a], ends[b]) <= epsilon) reach[a / 2][b / 2] = true;
  // Floyd-Warshall style closure.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  ComponentSets out;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> group;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) group.insert(ids[j]);
    out.insert(group);
  }
  return out;
}

double world_box_volume(std::span<const Point3> points) {
  double volume = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : points) {
      lo = std::min(lo, p[axis]);
      hi = std::max(hi, p[axis]);
    }
    volume *= 2.0 * std::max(0.001, (hi - lo) / 2.0 * 1.02);
  }
  return volume;
}

std::vector<Point3> walk_resample(std::span<const Point3> points, double spacing) {
  double length = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) length += distance(points[i - 1], points[i]);
  const int count = std::max(2, static_cast<int>(std::floor(length / spacing + 1e-9)) + 1);
  const double step = length / (count - 1);

  std::vector<Point3> out{points.front()};
  const int micro = 200000;
  const double dt = length / micro;
  double travelled = 0.0;
  std::size_t seg = 0;
  double seg_pos = 0.0;
  int next = 1;
  for (int k = 1; k <= micro && next < count - 1; ++k) {
    travelled = k * dt;
    seg_pos += dt;
    while (seg + 1 < points.size() - 1 && seg_pos > distance(points[seg], points[seg + 1])) {
      seg_pos -= distance(points[seg], points[seg + 1]);
      ++seg;
    }
    if (travelled + 1e-12 >= next * step) {
      const double len = distance(points[seg], points[seg + 1]);
      const double t = len > 0 ? std::min(1.0, seg_pos / len) : 0.0;
      out.push_back(points[seg] + (points[seg + 1] - points[seg]) * t);
      ++next;
    }
  }
  out.push_back(points.back());
  return out;
}

double sampled_triangle_distance(const Point3& p, const std::array<Point3, 3>& tri) {
  // Search over barycentric (u, v) with u, v >= 0, u + v <= 1.
  double cu = 1.0 / 3.0, cv = 1.0 / 3.0, half = 1.0;
  double best = std::numeric_limits<double>::infinity();
  const int grid = 100;  // 10^4 samples per level
  for (int level = 0; level < 8; ++level) {
    double bu = cu, bv = cv;
    for (int i = 0; i <= grid; ++i)
      for (int j = 0; j <= grid; ++j) {
        double u = cu + half * (2.0 * i / grid - 1.0);
        double v = cv + half * (2.0 * j / grid - 1.0);
        u = std::clamp(u, 0.0, 1.0);
        v = std::clamp(v, 0.0, 1.0);
        if (u + v > 1.0) {
          const double s = u + v;
          u /= s;
          v /= s;
        }
        const Point3 q = tri[0] + (tri[1] - tri[0]) * u + (tri[2] - tri[0]) * v;
        const double d = distance(p, q);
        if (d < best) {
          best = d;
          bu = u;
          bv = v;
        }
      }
    cu = bu;
    cv = bv;
    half *= 0.1;
  }
  return best;
}

}  // namespace sptest
