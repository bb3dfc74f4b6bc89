#include "records_json.hpp"

#include "placeplan/errors.hpp"
#include "placeplan/scene_io.hpp"

namespace placeplan {

std::string to_string(PlanStatus status) {
  return status == PlanStatus::ok ? "ok" : "no_stable_placement";
}

namespace detail {

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) { return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()); }

json metrics_json(const ReasonerMetrics& m) {
  return {{"wall_time", m.wall_time},
          {"prompt_tokens", m.prompt_tokens},
          {"completion_tokens", m.completion_tokens}};
}

ReasonerMetrics metrics_from(const json& j) {
  return {j.at("wall_time").get<double>(), j.at("prompt_tokens").get<long>(),
          j.at("completion_tokens").get<long>()};
}

json grid_spec_json(const GridSpec& g) {
  return {{"dims", json::array({g.dims[0], g.dims[1], g.dims[2]})},
          {"spacing", vec(g.spacing)},
          {"origin", vec(g.origin)}};
}

GridSpec grid_spec_from(const json& j) {
  GridSpec g;
  for (int a = 0; a < 3; ++a) g.dims[a] = j.at("dims").at(a).get<std::uint64_t>();
  g.spacing = vec_from(j.at("spacing"));
  g.origin = vec_from(j.at("origin"));
  return g;
}

}  // namespace

json to_json(const CandidateList& c) {
  json items = json::array();
  for (const auto& k : c.candidates)
    items.push_back({{"rank", k.rank}, {"point", vec(k.point)}, {"density", k.density}});
  return {{"seed", c.seed},
          {"min_separation", c.min_separation},
          {"requested", c.requested},
          {"short_list", c.short_list},
          {"items", items}};
}

CandidateList candidates_from(const json& j) {
  CandidateList c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.min_separation = j.at("min_separation").get<double>();
  c.requested = j.at("requested").get<int>();
  c.short_list = j.at("short_list").get<bool>();
  for (const auto& k : j.at("items"))
    c.candidates.push_back({vec_from(k.at("point")), k.at("density").get<double>(), k.at("rank").get<int>()});
  return c;
}

json to_json(const ReceptacleDecision& d) {
  return {{"receptacle_ids", d.receptacle_ids},
          {"rationale", d.rationale},
          {"metrics", metrics_json(d.metrics)}};
}

ReceptacleDecision decision_from(const json& j) {
  ReceptacleDecision d;
  d.receptacle_ids = j.at("receptacle_ids").get<std::vector<std::string>>();
  d.rationale = j.at("rationale").get<std::string>();
  d.metrics = metrics_from(j.at("metrics"));
  return d;
}

json to_json(const PlanResult& r, bool with_support) {
  json out = {{"run_id", r.run_id},
              {"status", to_string(r.status)},
              {"candidates", to_json(r.candidates)},
              {"decision", to_json(r.decision)},
              {"grid_points", r.grid_points},
              {"stable_points", r.stable_points},
              {"stable_fraction", r.stable_fraction},
              {"metrics",
               {{"stability_wall_time", r.metrics.stability_wall_time},
                {"density_wall_time", r.metrics.density_wall_time},
                {"total_wall_time", r.metrics.total_wall_time},
                {"reasoning", metrics_json(r.metrics.reasoning)},
                {"reasoner_used", r.metrics.reasoner_used},
                {"remote_error", r.metrics.remote_error}}}};
  if (r.density) {
    json d = {{"bandwidth", r.density->config.bandwidth},
              {"support_points", r.density->support.points.size()}};
    if (r.density->grid) d["grid"] = grid_spec_json(r.density->grid->spec);
    if (with_support) {
      json pts = json::array();
      for (const auto& p : r.density->support.points) pts.push_back(vec(p));
      d["points"] = pts;
      d["weights"] = r.density->support.weights;
    }
    out["density"] = d;
  } else {
    out["density"] = nullptr;
  }
  return out;
}

PlanResult plan_result_from(const json& j) {
  PlanResult r;
  r.run_id = j.at("run_id").get<std::string>();
  r.status = j.at("status").get<std::string>() == "ok" ? PlanStatus::ok : PlanStatus::no_stable_placement;
  r.candidates = candidates_from(j.at("candidates"));
  r.decision = decision_from(j.at("decision"));
  r.grid_points = j.at("grid_points").get<std::size_t>();
  r.stable_points = j.at("stable_points").get<std::size_t>();
  r.stable_fraction = j.at("stable_fraction").get<double>();
  const json& m = j.at("metrics");
  r.metrics.stability_wall_time = m.at("stability_wall_time").get<double>();
  r.metrics.density_wall_time = m.at("density_wall_time").get<double>();
  r.metrics.total_wall_time = m.at("total_wall_time").get<double>();
  r.metrics.reasoning = metrics_from(m.at("reasoning"));
  r.metrics.reasoner_used = m.at("reasoner_used").get<std::string>();
  r.metrics.remote_error = m.at("remote_error").get<std::string>();
  const json& d = j.at("density");
  if (!d.is_null()) {
    auto field = std::make_shared<DensityField>();
    field->config.bandwidth = d.at("bandwidth").get<double>();
    for (const auto& p : d.at("points")) field->support.points.push_back(vec_from(p));
    field->support.weights = d.at("weights").get<std::vector<double>>();
    if (d.contains("grid"))
      field->grid = evaluate_grid(field->support, field->config, grid_spec_from(d.at("grid")));
    r.density = field;
  }
  return r;
}

json to_json(const PlacementOutcome& o) {
  return {{"run_id", o.run_id},
          {"rank", o.rank},
          {"point", vec(o.point)},
          {"stable", o.stable},
          {"settled", o.settled},
          {"deviation", o.deviation},
          {"reasonable", o.reasonable ? json(*o.reasonable) : json(nullptr)}};
}

PlacementOutcome outcome_from(const json& j) {
  PlacementOutcome o;
  o.run_id = j.at("run_id").get<std::string>();
  o.rank = j.at("rank").get<int>();
  o.point = vec_from(j.at("point"));
  o.stable = j.at("stable").get<bool>();
  o.settled = j.at("settled").get<bool>();
  o.deviation = j.at("deviation").get<double>();
  if (!j.at("reasonable").is_null()) o.reasonable = j.at("reasonable").get<bool>();
  return o;
}

json to_json(const RunRecord& r) {
  return {{"run_id", r.run_id},
          {"scene_id", r.scene_id},
          {"scene", json::parse(serialize_scene(r.scene, -1))},
          {"task", {{"text", r.task.text}, {"similarity_hint", to_string(r.task.similarity_hint)}}},
          {"config", json::parse(serialize_config(r.config, -1))},
          {"ground_truth", r.ground_truth},
          {"result", to_json(r.result, true)},
          {"outcome", r.outcome ? to_json(*r.outcome) : json(nullptr)}};
}

RunRecord run_record_from(const json& j) {
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.scene_id = j.at("scene_id").get<std::string>();
  r.scene = parse_scene(j.at("scene").dump());
  r.task.text = j.at("task").at("text").get<std::string>();
  r.task.similarity_hint = similarity_hint_from_string(j.at("task").at("similarity_hint").get<std::string>());
  r.config = parse_config(j.at("config").dump());
  r.ground_truth = j.at("ground_truth").get<std::vector<std::string>>();
  r.result = plan_result_from(j.at("result"));
  if (!j.at("outcome").is_null()) r.outcome = outcome_from(j.at("outcome"));
  return r;
}

}  // namespace detail

std::string plan_result_json(const PlanResult& result, int indent) {
  return detail::to_json(result, false).dump(indent);
}

std::string outcome_json(const PlacementOutcome& outcome, int indent) {
  return detail::to_json(outcome).dump(indent);
}

std::string run_record_json(const RunRecord& record, int indent) {
  return detail::to_json(record).dump(indent);
}

RunRecord run_record_from_json(std::string_view text) {
  try {
    return detail::run_record_from(detail::json::parse(text));
  } catch (const detail::json::exception& e) {
    throw ParseError("", std::string("malformed run record: ") + e.what());
  }
}

}  // namespace placeplan
