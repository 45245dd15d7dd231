#include "spatialprompt/oriented_box.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spatialprompt {

namespace {

using Frame = std::array<Vec3, 3>;

constexpr Frame kWorld{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

Vec3 sign_normalized(Vec3 v) {
  int largest = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[largest])) largest = i;
  return v[largest] < 0.0 ? -v : v;
}

// Basis vector of the subspace orthogonal to `fixed`, taken from the world
// axis with the largest residual (lowest index on ties).
Vec3 world_axis_in_complement(std::span<const Vec3> fixed) {
  Vec3 best;
  double best_norm = -1.0;
  for (const Vec3& w : kWorld) {
    Vec3 r = w;
    for (const Vec3& f : fixed) r -= f * dot(r, f);
    const double n = norm(r);
    if (n > best_norm + 1e-12) {
      best_norm = n;
      best = r;
    }
  }
  return sign_normalized(normalized(best));
}

struct RawBox {
  Frame axes;
  Point3 center;
  std::array<double, 3> half;  // padded and floored
  double volume() const { return half[0] * half[1] * half[2]; }
};

RawBox measure(std::span<const Point3> points, const Point3& mean, const Frame& axes) {
  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    for (std::size_t i = 0; i < 3; ++i) {
      const double t = dot(d, axes[i]);
      lo[i] = std::min(lo[i], t);
      hi[i] = std::max(hi[i], t);
    }
  }
  RawBox box{axes, mean, {}};
  for (std::size_t i = 0; i < 3; ++i) {
    box.center += axes[i] * ((lo[i] + hi[i]) / 2.0);
    box.half[i] = std::max((hi[i] - lo[i]) / 2.0 * kBoxPadding, kMinHalfExtent);
  }
  return box;
}

std::optional<Frame> principal_frame(std::span<const Point3> points, const Point3& mean) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d(p.x - mean.x, p.y - mean.y, p.z - mean.z);
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  // Ascending from Eigen; flip to descending.
  std::array<double, 3> values{};
  Frame vectors{};
  for (int i = 0; i < 3; ++i) {
    values[static_cast<std::size_t>(i)] = solver.eigenvalues()[2 - i];
    const auto col = solver.eigenvectors().col(2 - i);
    vectors[static_cast<std::size_t>(i)] = sign_normalized(normalized(Vec3{col[0], col[1], col[2]}));
  }
  const double largest = values[0];
  if (!(largest > 0.0)) return std::nullopt;

  const double tol = kEigenTieRelative * largest;
  const bool tie01 = std::abs(values[0] - values[1]) < tol;
  const bool tie12 = std::abs(values[1] - values[2]) < tol;

  Frame axes = vectors;
  if (tie01 && tie12) {
    return std::nullopt;
  } else if (tie01) {
    // Distinct smallest axis; the top-two plane is degenerate.
    const Vec3 fixed[] = {vectors[2]};
    axes[0] = world_axis_in_complement(fixed);
    axes[1] = sign_normalized(cross(vectors[2], axes[0]));
  } else if (tie12) {
    const Vec3 fixed[] = {vectors[0]};
    axes[1] = world_axis_in_complement(fixed);
  }
  axes[2] = cross(axes[0], axes[1]);
  return axes;
}

}  // namespace

std::array<Point3, 8> OrientedBox::corners() const {
  std::array<Point3, 8> out;
  for (int i = 0; i < 8; ++i) {
    const double sx = (i & 1) ? 1.0 : -1.0;
    const double sy = (i & 2) ? 1.0 : -1.0;
    const double sz = (i & 4) ? 1.0 : -1.0;
    out[static_cast<std::size_t>(i)] =
        from_local({sx * half_extents[0], sy * half_extents[1], sz * half_extents[2]});
  }
  return out;
}

OrientedBox fit_oriented_box(std::span<const Point3> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyPointSet);
  Point3 mean;
  for (const auto& p : points) {
    if (!is_finite(p)) throw Error(ErrorCode::NonFinitePoint);
    mean += p;
  }
  mean *= 1.0 / static_cast<double>(points.size());

  RawBox chosen = measure(points, mean, kWorld);
  if (auto frame = principal_frame(points, mean)) {
    RawBox pca = measure(points, mean, *frame);
    if (pca.volume() < chosen.volume()) chosen = pca;
  }

  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return chosen.half[a] > chosen.half[b]; });
  OrientedBox box;
  box.center = chosen.center;
  for (std::size_t i = 0; i < 3; ++i) {
    box.axes[i] = chosen.axes[order[i]];
    box.half_extents[i] = chosen.half[order[i]];
  }
  box.axes[2] = cross(box.axes[0], box.axes[1]);
  return box;
}

Json to_json(const OrientedBox& box) {
  return Json{{"axes", Json::array({json_io::point(box.axes[0]), json_io::point(box.axes[1]),
                                    json_io::point(box.axes[2])})},
              {"center", json_io::point(box.center)},
              {"half_extents", Json::array({box.half_extents[0], box.half_extents[1], box.half_extents[2]})}};
}

OrientedBox box_from_json(const Json& v, ErrorCode code) {
  using namespace json_io;
  OrientedBox box;
  box.center = point(field(v, "center", code), code);
  const Json& axes = field(v, "axes", code);
  if (!axes.is_array() || axes.size() != 3) throw Error(code, "axes must hold 3 vectors");
  for (std::size_t i = 0; i < 3; ++i) box.axes[i] = point(axes[i], code);
  const Json& half = field(v, "half_extents", code);
  if (!half.is_array() || half.size() != 3) throw Error(code, "half_extents must hold 3 numbers");
  for (std::size_t i = 0; i < 3; ++i) {
    box.half_extents[i] = finite_number(half[i], code);
    if (!(box.half_extents[i] >= kMinHalfExtent)) throw Error(code, "half extent below floor");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::abs(norm(box.axes[i]) - 1.0) > 1e-6) throw Error(code, "axis not unit length");
    for (std::size_t j = i + 1; j < 3; ++j)
      if (std::abs(dot(box.axes[i], box.axes[j])) > 1e-6) throw Error(code, "axes not orthogonal");
  }
  if (dot(cross(box.axes[0], box.axes[1]), box.axes[2]) <= 0.0) throw Error(code, "axes not right-handed");
  return box;
}

}  // namespace spatialprompt
