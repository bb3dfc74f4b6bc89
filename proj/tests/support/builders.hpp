#pragma once

#include <string>

#include "placeplan/scene.hpp"
#include "placeplan/scene_io.hpp"

namespace placeplan::testing {

inline std::string scenario_path(const std::string& name) {
  return std::string(PLACEPLAN_SCENARIO_DIR) + "/" + name;
}

inline Scenario load_fixture(const std::string& name) { return load_scenario_file(scenario_path(name)); }

inline SceneObject box_object(const std::string& id, const Vec3& half, const Vec3& position,
                              bool is_static = true, double mass = 0.0) {
  SceneObject o;
  o.id = id;
  o.label = id;
  o.shapes.push_back(ShapePrimitive::box(half));
  o.pose.position = position;
  o.is_static = is_static;
  o.mass = mass;
  return o;
}

/// Table top spanning [-tx, tx] x [-ty, ty] with its upper face at `top`,
/// and a dynamic box to place.
inline Scene box_on_table(double tx, double ty, double top, const Vec3& half, const Aabb& workspace) {
  Scene s;
  s.objects.push_back(box_object("table", Vec3(tx, ty, 0.02), Vec3(0, 0, top - 0.02)));
  s.placement_object = box_object("box", half, Vec3::Zero(), false, 0.5);
  s.workspace = workspace;
  return s;
}

}  // namespace placeplan::testing
