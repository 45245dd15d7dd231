#pragma once

#include <array>
#include <span>

#include "spatialprompt/canonical.hpp"
#include "spatialprompt/geometry.hpp"

namespace spatialprompt {

inline constexpr double kBoxPadding = 1.02;
inline constexpr double kMinHalfExtent = 0.001;
inline constexpr double kEigenTieRelative = 1e-9;

/// Orthonormal right-handed frame with half extents sorted descending.
struct OrientedBox {
  Point3 center;
  std::array<Vec3, 3> axes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  std::array<double, 3> half_extents{kMinHalfExtent, kMinHalfExtent, kMinHalfExtent};

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;

  double volume() const { return 8.0 * half_extents[0] * half_extents[1] * half_extents[2]; }
  double diagonal() const {
    return 2.0 * std::sqrt(half_extents[0] * half_extents[0] + half_extents[1] * half_extents[1] +
                           half_extents[2] * half_extents[2]);
  }
  double max_extent() const { return 2.0 * half_extents[0]; }

  /// Coordinates of `p` in the box frame, relative to the center.
  Vec3 to_local(const Point3& p) const {
    const Vec3 d = p - center;
    return {dot(d, axes[0]), dot(d, axes[1]), dot(d, axes[2])};
  }
  Point3 from_local(const Vec3& l) const {
    return center + axes[0] * l.x + axes[1] * l.y + axes[2] * l.z;
  }

  /// Containment with every half extent grown by `margin` meters.
  bool contains(const Point3& p, double margin = 1e-9) const {
    const Vec3 l = to_local(p);
    for (int i = 0; i < 3; ++i)
      if (std::abs(l[i]) > half_extents[static_cast<std::size_t>(i)] + margin) return false;
    return true;
  }

  std::array<Point3, 8> corners() const;
};

/// PCA box with world-aligned fallback; pads by 2% and floors half extents at 1 mm.
///
/// Eigenvectors are ordered by descending eigenvalue with each axis signed so
/// its largest-magnitude entry is positive. Eigenvalues closer than 1e-9
/// (relative to the largest) span a degenerate subspace whose basis is taken
/// from the world axes projected into it. The world-aligned box is always
/// evaluated too and the smaller-volume box wins.
OrientedBox fit_oriented_box(std::span<const Point3> points);

Json to_json(const OrientedBox& box);
/// Validates orthonormality, handedness and the half-extent floor.
OrientedBox box_from_json(const Json& value, ErrorCode code);

}  // namespace spatialprompt
