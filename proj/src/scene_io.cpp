#include "placeplan/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "placeplan/errors.hpp"

namespace placeplan {

using nlohmann::json;

namespace {

/// Walks a JSON tree keeping the JSON-pointer location for error messages.
class Reader {
 public:
  Reader(const ParseOptions& options, std::vector<std::string>* warnings)
      : options_(options), warnings_(warnings) {}

  void check_keys(const json& obj, const std::string& loc,
                  std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) throw ParseError(loc, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : allowed) known = known || it.key() == k;
      if (known) continue;
      const std::string msg = "unknown key '" + it.key() + "'";
      if (options_.strict) throw ParseError(loc + "/" + it.key(), msg);
      if (warnings_) warnings_->push_back(loc + "/" + it.key() + ": " + msg);
    }
  }

  static const json& require(const json& obj, const char* key, const std::string& loc) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(loc + "/" + key, "missing required field");
    return *it;
  }

  static double number(const json& v, const std::string& loc) {
    if (!v.is_number()) throw ParseError(loc, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(loc, "expected a finite number");
    return d;
  }

  static std::string string(const json& v, const std::string& loc) {
    if (!v.is_string()) throw ParseError(loc, "expected a string");
    return v.get<std::string>();
  }

  static std::vector<double> numbers(const json& v, const std::string& loc, std::size_t n) {
    if (!v.is_array() || v.size() != n)
      throw ParseError(loc, "expected an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(v[i], loc + "/" + std::to_string(i)));
    return out;
  }

  static Vec3 vec3(const json& v, const std::string& loc) {
    const auto a = numbers(v, loc, 3);
    return Vec3(a[0], a[1], a[2]);
  }

  static UnitQuat quat(const json& v, const std::string& loc) {
    const auto a = numbers(v, loc, 4);
    const Eigen::Quaterniond q(a[0], a[1], a[2], a[3]);
    const double n2 = q.squaredNorm();
    if (std::abs(n2 - 1.0) <= 1e-9) return UnitQuat::from_wxyz(a[0], a[1], a[2], a[3]);
    // Hand-authored files carry rounded quaternions; accept small drift.
    if (std::abs(std::sqrt(n2) - 1.0) <= 1e-3) return UnitQuat::normalized(q);
    throw ParseError(loc, "orientation must be a unit quaternion [w, x, y, z]");
  }

  Pose pose(const json& v, const std::string& loc) const {
    check_keys(v, loc, {"position", "orientation"});
    Pose p;
    if (v.contains("position")) p.position = vec3(v["position"], loc + "/position");
    if (v.contains("orientation")) p.orientation = quat(v["orientation"], loc + "/orientation");
    return p;
  }

  ShapePrimitive shape(const json& v, const std::string& loc) const {
    check_keys(v, loc, {"kind", "dims", "offset"});
    const std::string kind = string(require(v, "kind", loc), loc + "/kind");
    const json& dims = require(v, "dims", loc);
    const std::string dloc = loc + "/dims";
    Pose offset;
    if (v.contains("offset")) offset = pose(v["offset"], loc + "/offset");
    ShapePrimitive s;
    if (kind == "box") {
      s = ShapePrimitive::box(vec3(dims, dloc), offset);
    } else if (kind == "cylinder") {
      const auto d = numbers(dims, dloc, 2);
      s = ShapePrimitive::cylinder(d[0], d[1], offset);
    } else if (kind == "sphere") {
      const auto d = numbers(dims, dloc, 1);
      s = ShapePrimitive::sphere(d[0], offset);
    } else {
      throw ParseError(loc + "/kind", "unknown shape kind '" + kind + "'");
    }
    return s;
  }

  SceneObject object(const json& v, const std::string& loc) const {
    check_keys(v, loc, {"id", "label", "static", "mass", "pose", "shapes", "attributes"});
    SceneObject o;
    o.id = string(require(v, "id", loc), loc + "/id");
    o.label = string(require(v, "label", loc), loc + "/label");
    if (v.contains("static")) {
      if (!v["static"].is_boolean()) throw ParseError(loc + "/static", "expected a boolean");
      o.is_static = v["static"].get<bool>();
    }
    if (v.contains("mass")) o.mass = number(v["mass"], loc + "/mass");
    if (v.contains("pose")) o.pose = pose(v["pose"], loc + "/pose");
    const json& shapes = require(v, "shapes", loc);
    if (!shapes.is_array()) throw ParseError(loc + "/shapes", "expected an array");
    for (std::size_t i = 0; i < shapes.size(); ++i)
      o.shapes.push_back(shape(shapes[i], loc + "/shapes/" + std::to_string(i)));
    if (v.contains("attributes")) {
      const json& attrs = v["attributes"];
      if (!attrs.is_object()) throw ParseError(loc + "/attributes", "expected a string map");
      for (auto it = attrs.begin(); it != attrs.end(); ++it)
        o.attributes[it.key()] = string(it.value(), loc + "/attributes/" + it.key());
    }
    return o;
  }

  Scene scene(const json& root) const {
    check_keys(root, "", {"objects", "placement_object", "workspace", "gravity", "scenario"});
    Scene s;
    const json& objects = require(root, "objects", "");
    if (!objects.is_array()) throw ParseError("/objects", "expected an array");
    for (std::size_t i = 0; i < objects.size(); ++i)
      s.objects.push_back(object(objects[i], "/objects/" + std::to_string(i)));
    s.placement_object = object(require(root, "placement_object", ""), "/placement_object");
    const json& ws = require(root, "workspace", "");
    check_keys(ws, "/workspace", {"min", "max"});
    s.workspace.min = vec3(require(ws, "min", "/workspace"), "/workspace/min");
    s.workspace.max = vec3(require(ws, "max", "/workspace"), "/workspace/max");
    if (root.contains("gravity")) s.gravity = number(root["gravity"], "/gravity");
    validate(s);
    return s;
  }

 private:
  ParseOptions options_;
  std::vector<std::string>* warnings_;
};

json parse_json(std::string_view document) {
  try {
    return json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), std::string("malformed JSON: ") + e.what());
  }
}

json pose_json(const Pose& p) {
  const auto& q = p.orientation;
  return json{{"position", {p.position.x(), p.position.y(), p.position.z()}},
              {"orientation", {q.w(), q.x(), q.y(), q.z()}}};
}

json shape_json(const ShapePrimitive& s) {
  json j;
  switch (s.kind()) {
    case ShapeKind::box: {
      const Vec3& h = std::get<BoxDims>(s.dims).half_extents;
      j["kind"] = "box";
      j["dims"] = {h.x(), h.y(), h.z()};
      break;
    }
    case ShapeKind::cylinder: {
      const auto& c = std::get<CylinderDims>(s.dims);
      j["kind"] = "cylinder";
      j["dims"] = {c.radius, c.half_height};
      break;
    }
    case ShapeKind::sphere:
      j["kind"] = "sphere";
      j["dims"] = {std::get<SphereDims>(s.dims).radius};
      break;
  }
  j["offset"] = pose_json(s.offset);
  return j;
}

json object_json(const SceneObject& o) {
  json shapes = json::array();
  for (const auto& s : o.shapes) shapes.push_back(shape_json(s));
  json attrs = json::object();
  for (const auto& [k, v] : o.attributes) attrs[k] = v;
  return json{{"id", o.id},          {"label", o.label}, {"static", o.is_static},
              {"mass", o.mass},      {"pose", pose_json(o.pose)},
              {"shapes", shapes},    {"attributes", attrs}};
}

json scene_json(const Scene& s) {
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back(object_json(o));
  const auto& ws = s.workspace;
  return json{{"objects", objects},
              {"placement_object", object_json(s.placement_object)},
              {"workspace",
               {{"min", {ws.min.x(), ws.min.y(), ws.min.z()}},
                {"max", {ws.max.x(), ws.max.y(), ws.max.z()}}}},
              {"gravity", s.gravity}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scene parse_scene(std::string_view document, const ParseOptions& options,
                  std::vector<std::string>* warnings) {
  return Reader(options, warnings).scene(parse_json(document));
}

Scenario parse_scenario(std::string_view document, const ParseOptions& options,
                        std::vector<std::string>* warnings) {
  const json root = parse_json(document);
  Reader reader(options, warnings);
  Scenario sc;
  sc.scene = reader.scene(root);
  if (!root.contains("scenario")) return sc;

  const json& meta = root["scenario"];
  const std::string loc = "/scenario";
  reader.check_keys(meta, loc,
                    {"id", "task", "similarity_hint", "ground_truth", "z_mode", "resolution"});
  if (meta.contains("id")) sc.id = Reader::string(meta["id"], loc + "/id");
  if (meta.contains("task")) {
    TaskDescription task;
    task.text = Reader::string(meta["task"], loc + "/task");
    if (meta.contains("similarity_hint")) {
      const auto hint = Reader::string(meta["similarity_hint"], loc + "/similarity_hint");
      try {
        task.similarity_hint = similarity_hint_from_string(hint);
      } catch (const ValidationError& e) {
        throw ParseError(loc + "/similarity_hint", e.what());
      }
    }
    sc.task = task;
  }
  if (meta.contains("ground_truth")) {
    const json& gt = meta["ground_truth"];
    if (!gt.is_array()) throw ParseError(loc + "/ground_truth", "expected an array of ids");
    for (std::size_t i = 0; i < gt.size(); ++i)
      sc.ground_truth.push_back(Reader::string(gt[i], loc + "/ground_truth/" + std::to_string(i)));
  }
  if (meta.contains("z_mode")) {
    try {
      sc.z_mode = z_mode_from_string(Reader::string(meta["z_mode"], loc + "/z_mode"));
    } catch (const ValidationError& e) {
      throw ParseError(loc + "/z_mode", e.what());
    }
  }
  if (meta.contains("resolution"))
    sc.resolution = Reader::number(meta["resolution"], loc + "/resolution");
  return sc;
}

std::string serialize_scene(const Scene& scene, int indent) {
  return scene_json(scene).dump(indent);
}

std::string serialize_scenario(const Scenario& sc, int indent) {
  json root = scene_json(sc.scene);
  json meta = json::object();
  if (!sc.id.empty()) meta["id"] = sc.id;
  if (sc.task) {
    meta["task"] = sc.task->text;
    meta["similarity_hint"] = to_string(sc.task->similarity_hint);
  }
  if (!sc.ground_truth.empty()) meta["ground_truth"] = sc.ground_truth;
  if (sc.z_mode) meta["z_mode"] = to_string(*sc.z_mode);
  if (sc.resolution) meta["resolution"] = *sc.resolution;
  if (!meta.empty()) root["scenario"] = meta;
  return root.dump(indent);
}

Scene load_scene_file(const std::string& path, const ParseOptions& options) {
  return parse_scene(read_file(path), options);
}

Scenario load_scenario_file(const std::string& path, const ParseOptions& options) {
  return parse_scenario(read_file(path), options);
}

}  // namespace placeplan
