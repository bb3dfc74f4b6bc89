#include "placeplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "placeplan/errors.hpp"

namespace placeplan {

ShapePrimitive ShapePrimitive::box(const Vec3& half_extents, const Pose& offset) {
  return ShapePrimitive{BoxDims{half_extents}, offset};
}

ShapePrimitive ShapePrimitive::cylinder(double radius, double half_height, const Pose& offset) {
  return ShapePrimitive{CylinderDims{radius, half_height}, offset};
}

ShapePrimitive ShapePrimitive::sphere(double radius, const Pose& offset) {
  return ShapePrimitive{SphereDims{radius}, offset};
}

double ShapePrimitive::volume() const {
  struct Visitor {
    double operator()(const BoxDims& b) const { return 8.0 * b.half_extents.prod(); }
    double operator()(const CylinderDims& c) const {
      return std::numbers::pi * c.radius * c.radius * 2.0 * c.half_height;
    }
    double operator()(const SphereDims& s) const {
      return 4.0 / 3.0 * std::numbers::pi * s.radius * s.radius * s.radius;
    }
  };
  return std::visit(Visitor{}, dims);
}

std::string SceneObject::attribute(const std::string& key) const {
  auto it = attributes.find(key);
  return it == attributes.end() ? std::string{} : it->second;
}

Vec3 SceneObject::local_com() const {
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (const auto& s : shapes) {
    const double v = s.volume();
    acc += v * s.offset.position;
    total += v;
  }
  return total > 0.0 ? Vec3(acc / total) : Vec3(Vec3::Zero());
}

const SceneObject* Scene::find(const std::string& id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

namespace {

void validate_shape(const ShapePrimitive& s, const std::string& where) {
  struct Visitor {
    const std::string& where;
    void operator()(const BoxDims& b) const {
      if (!is_finite(b.half_extents) || (b.half_extents.array() <= 0.0).any())
        throw ValidationError(where + ": box half-extents must be positive");
    }
    void operator()(const CylinderDims& c) const {
      if (!(c.radius > 0.0) || !(c.half_height > 0.0) || !std::isfinite(c.radius) ||
          !std::isfinite(c.half_height))
        throw ValidationError(where + ": cylinder radius and half-height must be positive");
    }
    void operator()(const SphereDims& s) const {
      if (!(s.radius > 0.0) || !std::isfinite(s.radius))
        throw ValidationError(where + ": sphere radius must be positive");
    }
  };
  std::visit(Visitor{where}, s.dims);
  if (!is_finite(s.offset.position)) throw ValidationError(where + ": non-finite shape offset");
}

void validate_object(const SceneObject& o, const std::string& where) {
  if (o.id.empty()) throw ValidationError(where + ": empty id");
  if (o.shapes.empty()) throw ValidationError(where + " (" + o.id + "): needs at least one shape");
  if (!is_finite(o.pose.position)) throw ValidationError(where + " (" + o.id + "): non-finite pose");
  if (!o.is_static && !(o.mass > 0.0 && std::isfinite(o.mass)))
    throw ValidationError(where + " (" + o.id + "): dynamic object needs positive mass");
  for (std::size_t i = 0; i < o.shapes.size(); ++i)
    validate_shape(o.shapes[i], where + " (" + o.id + ") shape " + std::to_string(i));
}

}  // namespace

void validate(const Scene& scene) {
  const auto& ws = scene.workspace;
  if (!is_finite(ws.min) || !is_finite(ws.max))
    throw ValidationError("workspace bounds must be finite");
  if ((ws.min.array() > ws.max.array()).any())
    throw ValidationError("workspace min must not exceed max");
  if (!(ws.min.x() < ws.max.x()) || !(ws.min.y() < ws.max.y()))
    throw ValidationError("workspace must have positive extent in x and y");
  if (!(scene.gravity > 0.0) || !std::isfinite(scene.gravity))
    throw ValidationError("gravity must be positive");

  std::set<std::string> ids;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    validate_object(o, "objects[" + std::to_string(i) + "]");
    if (!ids.insert(o.id).second) throw ValidationError("duplicate object id '" + o.id + "'");
  }
  validate_object(scene.placement_object, "placement_object");
  if (scene.placement_object.is_static)
    throw ValidationError("placement_object must not be static");
  if (ids.count(scene.placement_object.id))
    throw ValidationError("placement_object id '" + scene.placement_object.id +
                          "' collides with a scene object");
}

Aabb shape_aabb(const ShapePrimitive& shape, const Pose& object_pose) {
  const Pose world = object_pose * shape.offset;
  Vec3 half;
  switch (shape.kind()) {
    case ShapeKind::box:
      half = std::get<BoxDims>(shape.dims).half_extents;
      break;
    case ShapeKind::cylinder: {
      const auto& c = std::get<CylinderDims>(shape.dims);
      half = Vec3(c.radius, c.radius, c.half_height);
      break;
    }
    case ShapeKind::sphere: {
      const double r = std::get<SphereDims>(shape.dims).radius;
      half = Vec3::Constant(r);
      break;
    }
  }
  // Extent of a rotated box along each world axis is |R| * half.
  const Vec3 extent = world.orientation.matrix().cwiseAbs() * half;
  return Aabb{world.position - extent, world.position + extent};
}

Aabb object_aabb(const SceneObject& obj) {
  Aabb box;
  for (const auto& s : obj.shapes) box.extend(shape_aabb(s, obj.pose));
  return box;
}

std::string to_string(SimilarityHint hint) {
  switch (hint) {
    case SimilarityHint::none: return "none";
    case SimilarityHint::color: return "color";
    case SimilarityHint::shape: return "shape";
    case SimilarityHint::object_property: return "object_property";
    case SimilarityHint::genre: return "genre";
  }
  return "none";
}

SimilarityHint similarity_hint_from_string(const std::string& s) {
  if (s == "none" || s.empty()) return SimilarityHint::none;
  if (s == "color") return SimilarityHint::color;
  if (s == "shape") return SimilarityHint::shape;
  if (s == "object_property") return SimilarityHint::object_property;
  if (s == "genre") return SimilarityHint::genre;
  throw ValidationError("unknown similarity hint '" + s + "'");
}

}  // namespace placeplan
