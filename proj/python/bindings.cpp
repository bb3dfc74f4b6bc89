#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "placeplan/bench.hpp"
#include "placeplan/pipeline.hpp"
#include "placeplan/scene_io.hpp"

namespace py = pybind11;
using namespace placeplan;

namespace {

PipelineConfig config_from(const std::optional<std::string>& json) {
  return json ? parse_config(*json) : PipelineConfig{};
}

Vec3 vec(const std::array<double, 3>& a) { return Vec3(a[0], a[1], a[2]); }

std::array<double, 3> arr(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

// Planner plus the scenario metadata needed to plan from a document.
class PyPlanner {
 public:
  PyPlanner(const std::optional<std::string>& config, const std::optional<std::string>& store_dir)
      : planner_(config_from(config), builtin_backend(), nullptr,
                 store_dir ? std::make_shared<RunStore>(std::filesystem::path(*store_dir)) : nullptr) {}

  std::string plan(const std::string& scenario_json, const std::optional<std::string>& task,
                   const std::optional<std::uint64_t>& seed) {
    const Scenario sc = parse_scenario(scenario_json);
    TaskDescription t = sc.task.value_or(TaskDescription{});
    if (task) t.text = *task;
    PlanOptions options;
    options.ground_truth = sc.ground_truth;
    options.z_mode = sc.z_mode;
    options.resolution = sc.resolution;
    options.seed = seed;
    PlanResult result;
    {
      py::gil_scoped_release release;
      result = planner_.plan(sc.scene, t, options);
    }
    return plan_result_json(result);
  }

  std::string select(const std::string& run_id, int rank) {
    py::gil_scoped_release release;
    return outcome_json(planner_.execute_selection(run_id, rank));
  }

  py::bytes density(const std::string& run_id, const std::string& format) {
    const auto record = planner_.store().run(run_id);
    if (!record) throw NotFound("unknown run '" + run_id + "'");
    const auto& field = record->result.density;
    if (!field || !field->grid) throw NotFound("run '" + run_id + "' has no density grid");
    if (format == "binary") return py::bytes(grid_to_binary(*field->grid));
    if (format == "text") return py::bytes(grid_to_text(*field->grid));
    throw ValidationError("format must be binary or text");
  }

  std::string record(const std::string& run_id) {
    const auto r = planner_.store().run(run_id);
    if (!r) throw NotFound("unknown run '" + run_id + "'");
    return run_record_json(*r);
  }

  std::string bench(const std::string& suite_dir, int repetitions, bool with_timing) {
    const auto suite = load_suite(suite_dir);
    py::gil_scoped_release release;
    return run_benchmark(planner_, suite, repetitions).to_json(with_timing, -1);
  }

  std::string config() const { return serialize_config(planner_.config(), -1); }

 private:
  Planner planner_;
};

py::dict simulate(const std::string& scene_json, const std::array<double, 3>& point,
                  const std::optional<std::string>& config) {
  const Scene scene = parse_scenario(scene_json).scene;
  const PipelineConfig cfg = config_from(config);
  OrientationTrace trace;
  {
    py::gil_scoped_release release;
    trace = simulate_placement(*builtin_backend(), scene, vec(point), cfg.sim);
  }
  py::dict out;
  out["samples"] = trace.samples;
  out["settled"] = trace.settled;
  out["penetrated"] = trace.penetrated;
  out["stable"] = is_stable(trace, cfg.sim);
  out["max_deviation"] = trace.max_deviation();
  out["reward"] = stability_reward(trace, cfg.sim);
  return out;
}

py::list sweep(const std::string& scenario_json, const std::optional<std::string>& config) {
  const Scenario sc = parse_scenario(scenario_json);
  PlanOptions options;
  options.z_mode = sc.z_mode;
  options.resolution = sc.resolution;
  const Planner planner(config_from(config));
  std::shared_ptr<const SweepCache> cache;
  {
    py::gil_scoped_release release;
    cache = planner.sweep(sc.scene, options);
  }
  py::list rows;
  for (const auto& d : cache->sweep.diagnostics) {
    py::dict row;
    row["point"] = arr(d.point);
    row["stable"] = d.included;
    row["reward"] = d.reward_raw;
    row["max_deviation"] = d.max_deviation;
    row["settled"] = d.settled;
    row["penetrated"] = d.penetrated;
    rows.append(row);
  }
  return rows;
}

std::vector<double> kde(const std::vector<std::array<double, 3>>& points, const std::vector<double>& weights,
                        double bandwidth, const std::vector<std::array<double, 3>>& queries) {
  WeightedPoints support;
  for (const auto& p : points) support.points.push_back(vec(p));
  support.weights = weights;
  if (support.weights.size() != support.points.size())
    throw ContractViolation("points and weights differ in length");
  KdeConfig cfg;
  cfg.bandwidth = bandwidth;
  cfg.validate();
  std::vector<double> out;
  for (const auto& q : queries) out.push_back(kde_evaluate(support, cfg, vec(q)));
  return out;
}

py::dict decode_grid(const py::bytes& data) {
  const DensityGrid g = grid_from_binary(std::string(data));
  py::dict out;
  out["dims"] = std::vector<std::uint64_t>(g.spec.dims.begin(), g.spec.dims.end());
  out["spacing"] = arr(g.spec.spacing);
  out["origin"] = arr(g.spec.origin);
  out["values"] = g.values;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the placement planner";

  // Errors map by code so stage-tagged errors keep their specific type.
  static py::exception<Error> base(m, "PlaceplanError");
  static py::exception<Error> not_found(m, "NotFoundError", base.ptr());
  static py::exception<Error> already_placed(m, "AlreadyPlacedError", base.ptr());
  static py::exception<Error> invalid(m, "InvalidInputError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = e.code() + ": " + e.what();
      if (e.code() == "not_found") {
        py::set_error(not_found, msg.c_str());
      } else if (e.code() == "already_placed") {
        py::set_error(already_placed, msg.c_str());
      } else if (e.code() == "parse_error" || e.code() == "validation_error" ||
                 e.code() == "contract_violation") {
        py::set_error(invalid, msg.c_str());
      } else {
        py::set_error(base, msg.c_str());
      }
    }
  });

  py::class_<PyPlanner>(m, "Planner")
      .def(py::init<const std::optional<std::string>&, const std::optional<std::string>&>(),
           py::arg("config") = py::none(), py::arg("store_dir") = py::none())
      .def("plan", &PyPlanner::plan, py::arg("scenario"), py::arg("task") = py::none(),
           py::arg("seed") = py::none())
      .def("select", &PyPlanner::select, py::arg("run_id"), py::arg("rank"))
      .def("density", &PyPlanner::density, py::arg("run_id"), py::arg("format") = "binary")
      .def("record", &PyPlanner::record, py::arg("run_id"))
      .def("bench", &PyPlanner::bench, py::arg("suite_dir"), py::arg("repetitions"),
           py::arg("with_timing") = true)
      .def("config", &PyPlanner::config);

  m.def("simulate", &simulate, py::arg("scene"), py::arg("point"), py::arg("config") = py::none());
  m.def("sweep", &sweep, py::arg("scenario"), py::arg("config") = py::none());
  m.def("kde", &kde, py::arg("points"), py::arg("weights"), py::arg("bandwidth"), py::arg("queries"));
  m.def("decode_grid", &decode_grid, py::arg("data"));
  m.def("default_config", [] { return serialize_config(PipelineConfig{}, -1); });
}
