#pragma once

#include <string>
#include <vector>

#include "placeplan/pipeline.hpp"
#include "placeplan/scene_io.hpp"

namespace placeplan {

struct BenchRow {
  std::string scenario_id;
  int repetitions = 0;
  int sample_k = 0;
  double sta_sr = 0.0;
  double rea_sr = 0.0;
  double candidates_mean = 0.0;  // candidates returned per plan
  double wall_time_mean = 0.0;   // s, per plan, sweep excluded
  double wall_time_std = 0.0;
  double sweep_wall_time = 0.0;  // s, once per scenario
  double tokens_mean = 0.0;      // prompt + completion
  double prompt_tokens_mean = 0.0;
  double completion_tokens_mean = 0.0;
  std::size_t grid_points = 0;
  std::size_t stable_points = 0;
  double stable_fraction = 0.0;
  int remote_failures = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  PipelineConfig config;
  int repetitions = 0;
  int sample_k = 0;

  /// Wall-time fields are omitted when `with_timing` is false.
  std::string to_json(bool with_timing = true, int indent = 2) const;
};

/// For each scenario: one candidate sweep, then `repetitions` plans with seed
/// base + rep, each auto-selecting rank 1. Throws ValidationError when a
/// scenario lacks ground truth or repetitions < 1.
BenchReport run_benchmark(Planner& planner, const std::vector<Scenario>& suite, int repetitions);

/// Scenario files (*.json) in `dir`, sorted by file name.
std::vector<Scenario> load_suite(const std::string& dir);

}  // namespace placeplan
