#pragma once

// Convex polyhedron kernel used by the built-in backend and by candidate
// generation. Cylinders become regular prisms (kCylinderSides faces) with a
// flat face pointing along -y of the shape frame.

#include <optional>
#include <utility>
#include <vector>

#include "placeplan/geometry.hpp"
#include "placeplan/scene.hpp"

namespace placeplan::detail {

inline constexpr int kCylinderSides = 32;

struct Plane {
  Vec3 normal;  // outward, unit
  double offset = 0.0;  // inside: normal . x <= offset
};

struct ConvexPolyhedron {
  std::vector<Vec3> vertices;
  std::vector<Plane> faces;
  std::vector<std::pair<int, int>> edges;
  std::vector<Vec3> face_axes;  // unique face normal directions up to sign
  std::vector<Vec3> edge_axes;  // unique edge directions up to sign
  Aabb bounds;

  /// max over faces of (n . p - d): <= 0 inside, > 0 outside (a lower bound
  /// on the Euclidean distance outside).
  double plane_distance(const Vec3& p) const;
  void transform(const Pose& pose);
};

/// Throws UnsupportedGeometry for shapes without a polyhedral model.
ConvexPolyhedron make_polyhedron(const ShapePrimitive& shape, const Pose& object_pose);

/// Separating-axis test. Returns the penetration depth (> 0) when the
/// bodies overlap on every axis, otherwise a non-positive value whose
/// magnitude is the gap along the first separating axis found.
double penetration_depth(const ConvexPolyhedron& a, const ConvexPolyhedron& b);

/// Points where the surfaces of a and b are within `tolerance` of each other:
/// vertices of either body near the other and near edge-edge crossings.
void contact_points(const ConvexPolyhedron& a, const ConvexPolyhedron& b, double tolerance,
                    std::vector<Vec3>& out);

/// Vertical extent [bottom, top] of the polyhedron along the line through
/// (x, y), if the line hits it.
std::optional<std::pair<double, double>> vertical_span(const ConvexPolyhedron& p, double x,
                                                       double y);

}  // namespace placeplan::detail
