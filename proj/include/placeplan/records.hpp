#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "placeplan/config.hpp"
#include "placeplan/density.hpp"
#include "placeplan/reasoning.hpp"
#include "placeplan/scene.hpp"

namespace placeplan {

enum class PlanStatus { ok, no_stable_placement };

std::string to_string(PlanStatus status);

struct PlanMetrics {
  double stability_wall_time = 0.0;  // s; zero when a cached sweep was reused
  double density_wall_time = 0.0;
  double total_wall_time = 0.0;
  ReasonerMetrics reasoning;
  std::string reasoner_used;  // "rule", "llm" or "none"
  std::string remote_error;   // set when the remote reasoner failed and was replaced
};

struct PlanResult {
  std::string run_id;
  PlanStatus status = PlanStatus::ok;
  CandidateList candidates;
  ReceptacleDecision decision;
  std::size_t grid_points = 0;
  std::size_t stable_points = 0;
  double stable_fraction = 0.0;
  PlanMetrics metrics;
  /// Blended support plus the heatmap lattice; null without stable points.
  std::shared_ptr<const DensityField> density;
};

struct PlacementOutcome {
  std::string run_id;
  int rank = 0;
  Vec3 point = Vec3::Zero();
  bool stable = false;
  bool settled = false;
  double deviation = 0.0;  // max |q(t) - q(1)| of the re-simulated worst case
  std::optional<bool> reasonable;  // set when the scene declares ground truth
};

/// Everything needed to reproduce or replay a run.
struct RunRecord {
  std::string run_id;
  std::string scene_id;  // empty for runs not created through the service
  Scene scene;
  TaskDescription task;
  PipelineConfig config;
  std::vector<std::string> ground_truth;
  PlanResult result;
  std::optional<PlacementOutcome> outcome;
};

std::string plan_result_json(const PlanResult& result, int indent = -1);
std::string outcome_json(const PlacementOutcome& outcome, int indent = -1);
std::string run_record_json(const RunRecord& record, int indent = -1);
RunRecord run_record_from_json(std::string_view text);

}  // namespace placeplan
