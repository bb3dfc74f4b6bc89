#include "placeplan/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

namespace placeplan {

using nlohmann::json;

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string BenchReport::to_json(bool with_timing, int indent) const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    json row = {{"scenario", r.scenario_id},
                {"repetitions", r.repetitions},
                {"sample_k", r.sample_k},
                {"sta_sr", r.sta_sr},
                {"rea_sr", r.rea_sr},
                {"candidates_mean", r.candidates_mean},
                {"tokens_mean", r.tokens_mean},
                {"prompt_tokens_mean", r.prompt_tokens_mean},
                {"completion_tokens_mean", r.completion_tokens_mean},
                {"grid_points", r.grid_points},
                {"stable_points", r.stable_points},
                {"stable_fraction", r.stable_fraction},
                {"remote_failures", r.remote_failures}};
    if (with_timing) {
      row["wall_time_mean"] = r.wall_time_mean;
      row["wall_time_std"] = r.wall_time_std;
      row["sweep_wall_time"] = r.sweep_wall_time;
    }
    rows_json.push_back(row);
  }
  json doc = {{"repetitions", repetitions},
              {"sample_k", sample_k},
              {"config", json::parse(serialize_config(config, -1))},
              {"rows", rows_json}};
  return doc.dump(indent);
}

BenchReport run_benchmark(Planner& planner, const std::vector<Scenario>& suite, int repetitions) {
  if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
  for (const auto& s : suite) {
    if (s.ground_truth.empty())
      throw ValidationError("scenario '" + s.id + "' declares no ground-truth receptacle");
    validate(s.scene);
  }
  const PipelineConfig& cfg = planner.config();
  BenchReport report;
  report.config = cfg;
  report.repetitions = repetitions;
  report.sample_k = cfg.sample_k;

  for (const auto& s : suite) {
    PlanOptions options;
    options.ground_truth = s.ground_truth;
    options.z_mode = s.z_mode;
    options.resolution = s.resolution;
    options.sweep = planner.sweep(s.scene, options);
    const TaskDescription task = s.task.value_or(TaskDescription{});

    BenchRow row;
    row.scenario_id = s.id;
    row.repetitions = repetitions;
    row.sample_k = cfg.sample_k;
    row.sweep_wall_time = options.sweep->wall_time;
    row.grid_points = options.sweep->grid.points.size();
    row.stable_points = options.sweep->sweep.stable.entries.size();
    row.stable_fraction = options.sweep->sweep.stable_fraction;
    std::vector<double> times, tokens, prompt, completion, counts;
    int stable = 0;
    int reasonable = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
      options.seed = cfg.seed + static_cast<std::uint64_t>(rep);
      const PlanResult plan = planner.plan(s.scene, task, options);
      times.push_back(plan.metrics.total_wall_time);
      const auto& m = plan.metrics.reasoning;
      tokens.push_back(static_cast<double>(m.prompt_tokens + m.completion_tokens));
      prompt.push_back(static_cast<double>(m.prompt_tokens));
      completion.push_back(static_cast<double>(m.completion_tokens));
      counts.push_back(static_cast<double>(plan.candidates.candidates.size()));
      if (!plan.metrics.remote_error.empty()) ++row.remote_failures;
      if (plan.candidates.candidates.empty()) continue;
      const PlacementOutcome outcome = planner.execute_selection(plan.run_id, 1);
      stable += outcome.stable ? 1 : 0;
      reasonable += outcome.reasonable.value_or(false) ? 1 : 0;
    }
    row.sta_sr = static_cast<double>(stable) / repetitions;
    row.rea_sr = static_cast<double>(reasonable) / repetitions;
    row.candidates_mean = mean(counts);
    row.wall_time_mean = mean(times);
    row.wall_time_std = stddev(times);
    row.tokens_mean = mean(tokens);
    row.prompt_tokens_mean = mean(prompt);
    row.completion_tokens_mean = mean(completion);
    report.rows.push_back(row);
  }
  return report;
}

std::vector<Scenario> load_suite(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> suite;
  for (const auto& f : files) {
    Scenario s = load_scenario_file(f.string());
    if (s.id.empty()) s.id = f.stem().string();
    suite.push_back(std::move(s));
  }
  return suite;
}

}  // namespace placeplan
