#include "placeplan/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "placeplan/errors.hpp"

namespace placeplan {

using nlohmann::json;

std::string to_string(ReasonerKind kind) {
  switch (kind) {
    case ReasonerKind::rule:
      return "rule";
    case ReasonerKind::llm:
      return "llm";
    case ReasonerKind::llm_with_fallback:
      return "llm_with_fallback";
  }
  return "rule";
}

ReasonerKind reasoner_kind_from_string(const std::string& s) {
  if (s == "rule") return ReasonerKind::rule;
  if (s == "llm") return ReasonerKind::llm;
  if (s == "llm_with_fallback") return ReasonerKind::llm_with_fallback;
  throw ValidationError("unknown reasoner '" + s + "'");
}

void PipelineConfig::validate() const {
  sim.validate();
  kde.validate();
  blend.validate();
  if (sample_k < 1) throw ValidationError("sample_k must be at least 1");
  if (!(min_separation >= 0.0)) throw ValidationError("min_separation must be non-negative");
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw ValidationError("resolution must be positive");
  if (point_cap < 1) throw ValidationError("point_cap must be positive");
  if (!(receptacle_radius > 0.0)) throw ValidationError("receptacle_radius must be positive");
  if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
  if (density_cells < 1) throw ValidationError("density_cells must be positive");
  if (!(llm.timeout_seconds > 0.0)) throw ValidationError("llm.timeout_seconds must be positive");
  if (llm.max_attempts < 1) throw ValidationError("llm.max_attempts must be at least 1");
}

namespace {

void check_keys(const json& obj, const std::string& loc, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(loc, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ParseError(loc + "/" + it.key(), "unknown key '" + it.key() + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& loc, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(loc + "/" + key, "wrong type");
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const PipelineConfig& c) {
  json tilts = json::array();
  for (const auto& t : c.sim.perturbation_tilts) tilts.push_back({{"axis", vec_json(t.axis)}, {"angle", t.angle}});
  json sim = {{"steps", c.sim.steps},
              {"dt", c.sim.dt},
              {"stability_tolerance", c.sim.stability_tolerance},
              {"sigma_mode", to_string(c.sim.sigma_mode)},
              {"perturbation_tilts", tilts},
              {"perturbation_step", c.sim.perturbation_step ? json(*c.sim.perturbation_step) : json(nullptr)},
              {"invert_reward", c.sim.invert_reward}};
  return {{"sim", sim},
          {"kde", {{"bandwidth", c.kde.bandwidth}, {"kernel", "gaussian_rbf"}}},
          {"blend", {{"beta", c.blend.beta}}},
          {"reasoner", to_string(c.reasoner)},
          {"sample_k", c.sample_k},
          {"min_separation", c.min_separation},
          {"seed", c.seed},
          {"resolution", c.resolution},
          {"z_mode", to_string(c.z_mode)},
          {"point_cap", c.point_cap},
          {"receptacle_radius", c.receptacle_radius},
          {"repetitions", c.repetitions},
          {"threads", c.threads},
          {"density_cells", c.density_cells},
          {"llm",
           {{"endpoint", c.llm.endpoint},
            {"model", c.llm.model},
            {"timeout_seconds", c.llm.timeout_seconds},
            {"max_attempts", c.llm.max_attempts},
            {"api_key_env", c.llm.api_key_env}}},
          {"prompt_dir", c.prompt_dir}};
}

PipelineConfig from_json(const json& doc) {
  check_keys(doc, "", {"sim", "kde", "blend", "reasoner", "sample_k", "min_separation", "seed",
                       "resolution", "z_mode", "point_cap", "receptacle_radius", "repetitions",
                       "threads", "density_cells", "llm", "prompt_dir"});
  PipelineConfig c;
  if (doc.contains("sim")) {
    const json& s = doc["sim"];
    check_keys(s, "/sim", {"steps", "dt", "stability_tolerance", "sigma_mode", "perturbation_tilts",
                           "perturbation_step", "invert_reward"});
    read(s, "steps", "/sim", c.sim.steps);
    read(s, "dt", "/sim", c.sim.dt);
    read(s, "stability_tolerance", "/sim", c.sim.stability_tolerance);
    std::string mode = to_string(c.sim.sigma_mode);
    read(s, "sigma_mode", "/sim", mode);
    try {
      c.sim.sigma_mode = sigma_mode_from_string(mode);
    } catch (const ValidationError& e) {
      throw ParseError("/sim/sigma_mode", e.what());
    }
    if (s.contains("perturbation_tilts")) {
      const json& tilts = s["perturbation_tilts"];
      if (!tilts.is_array()) throw ParseError("/sim/perturbation_tilts", "expected an array");
      c.sim.perturbation_tilts.clear();
      for (std::size_t i = 0; i < tilts.size(); ++i) {
        const std::string loc = "/sim/perturbation_tilts/" + std::to_string(i);
        check_keys(tilts[i], loc, {"axis", "angle"});
        std::vector<double> axis;
        double angle = 0.0;
        read(tilts[i], "axis", loc, axis);
        read(tilts[i], "angle", loc, angle);
        if (axis.size() != 3) throw ParseError(loc + "/axis", "expected 3 numbers");
        Vec3 a(axis[0], axis[1], axis[2]);
        if (a.norm() > 0.0) a.normalize();
        c.sim.perturbation_tilts.push_back({a, angle});
      }
    }
    if (s.contains("perturbation_step") && !s["perturbation_step"].is_null()) {
      int k = 0;
      read(s, "perturbation_step", "/sim", k);
      c.sim.perturbation_step = k;
    }
    read(s, "invert_reward", "/sim", c.sim.invert_reward);
  }
  if (doc.contains("kde")) {
    check_keys(doc["kde"], "/kde", {"bandwidth", "kernel"});
    read(doc["kde"], "bandwidth", "/kde", c.kde.bandwidth);
    std::string kernel = "gaussian_rbf";
    read(doc["kde"], "kernel", "/kde", kernel);
    if (kernel != "gaussian_rbf") throw ParseError("/kde/kernel", "unknown kernel '" + kernel + "'");
  }
  if (doc.contains("blend")) {
    check_keys(doc["blend"], "/blend", {"beta"});
    read(doc["blend"], "beta", "/blend", c.blend.beta);
  }
  std::string reasoner = to_string(c.reasoner);
  read(doc, "reasoner", "", reasoner);
  std::string z_mode = to_string(c.z_mode);
  read(doc, "z_mode", "", z_mode);
  try {
    c.reasoner = reasoner_kind_from_string(reasoner);
    c.z_mode = z_mode_from_string(z_mode);
  } catch (const ValidationError& e) {
    throw ParseError("", e.what());
  }
  read(doc, "sample_k", "", c.sample_k);
  read(doc, "min_separation", "", c.min_separation);
  read(doc, "seed", "", c.seed);
  read(doc, "resolution", "", c.resolution);
  read(doc, "point_cap", "", c.point_cap);
  read(doc, "receptacle_radius", "", c.receptacle_radius);
  read(doc, "repetitions", "", c.repetitions);
  read(doc, "threads", "", c.threads);
  read(doc, "density_cells", "", c.density_cells);
  if (doc.contains("llm")) {
    const json& l = doc["llm"];
    check_keys(l, "/llm", {"endpoint", "model", "timeout_seconds", "max_attempts", "api_key_env"});
    read(l, "endpoint", "/llm", c.llm.endpoint);
    read(l, "model", "/llm", c.llm.model);
    read(l, "timeout_seconds", "/llm", c.llm.timeout_seconds);
    read(l, "max_attempts", "/llm", c.llm.max_attempts);
    read(l, "api_key_env", "/llm", c.llm.api_key_env);
  }
  read(doc, "prompt_dir", "", c.prompt_dir);
  c.validate();
  return c;
}

json parse_json(std::string_view document) {
  try {
    return json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed config: ") + e.what());
  }
}

}  // namespace

PipelineConfig parse_config(std::string_view document) { return from_json(parse_json(document)); }

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const PipelineConfig& cfg, int indent) { return to_json(cfg).dump(indent); }

PipelineConfig apply_overrides(const PipelineConfig& base, std::string_view patch) {
  json doc = to_json(base);
  doc.merge_patch(parse_json(patch));
  return from_json(doc);
}

}  // namespace placeplan
