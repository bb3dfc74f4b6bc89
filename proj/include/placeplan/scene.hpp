#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "placeplan/geometry.hpp"

namespace placeplan {

struct BoxDims {
  Vec3 half_extents;
  bool operator==(const BoxDims&) const = default;
};

struct CylinderDims {
  double radius = 0.0;
  double half_height = 0.0;  // along the shape's local z
  bool operator==(const CylinderDims&) const = default;
};

/// Accepted by the scene model and the bounding-box code; the built-in
/// physics backend rejects it with UnsupportedGeometry.
struct SphereDims {
  double radius = 0.0;
  bool operator==(const SphereDims&) const = default;
};

enum class ShapeKind { box, cylinder, sphere };

struct ShapePrimitive {
  std::variant<BoxDims, CylinderDims, SphereDims> dims;
  Pose offset;  // relative to the owning object's frame

  static ShapePrimitive box(const Vec3& half_extents, const Pose& offset = {});
  static ShapePrimitive cylinder(double radius, double half_height, const Pose& offset = {});
  static ShapePrimitive sphere(double radius, const Pose& offset = {});

  ShapeKind kind() const { return static_cast<ShapeKind>(dims.index()); }
  double volume() const;
  bool operator==(const ShapePrimitive& o) const { return dims == o.dims && offset == o.offset; }
};

struct SceneObject {
  std::string id;
  std::string label;
  std::vector<ShapePrimitive> shapes;
  Pose pose;
  double mass = 0.0;  // kg; ignored for static objects
  bool is_static = false;
  std::map<std::string, std::string> attributes;

  /// Attribute value or empty string.
  std::string attribute(const std::string& key) const;
  /// Volume-weighted centroid of the shapes in the object frame.
  Vec3 local_com() const;
  bool operator==(const SceneObject&) const = default;
};

struct Scene {
  std::vector<SceneObject> objects;
  SceneObject placement_object;
  Aabb workspace;
  double gravity = 9.81;  // m/s^2 acting along -z

  const SceneObject* find(const std::string& id) const;
  bool operator==(const Scene&) const = default;
};

/// Throws ValidationError on the first violated scene invariant.
void validate(const Scene& scene);

/// World-frame AABB of every shape at the object's pose. Cylinders and
/// spheres are bounded by their circumscribing boxes.
Aabb object_aabb(const SceneObject& obj);
Aabb shape_aabb(const ShapePrimitive& shape, const Pose& object_pose);

enum class SimilarityHint { none, color, shape, object_property, genre };

struct TaskDescription {
  std::string text;
  SimilarityHint similarity_hint = SimilarityHint::none;
  bool operator==(const TaskDescription&) const = default;
};

std::string to_string(SimilarityHint hint);
SimilarityHint similarity_hint_from_string(const std::string& s);

enum class CandidateSource { lattice, explicit_points };

/// The candidate placement point set, ordered lexicographically by (x, y, z).
struct CandidateGrid {
  std::vector<Vec3> points;
  double resolution = 0.0;
  CandidateSource source = CandidateSource::lattice;
};

}  // namespace placeplan
