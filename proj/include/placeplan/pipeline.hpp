#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "placeplan/config.hpp"
#include "placeplan/errors.hpp"
#include "placeplan/physics.hpp"
#include "placeplan/records.hpp"
#include "placeplan/run_store.hpp"

namespace placeplan {

enum class Stage { ingest, stability, reasoning, density, selection };

std::string to_string(Stage stage);

/// A component error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(Stage stage, const Error& cause)
      : Error(cause.code(), cause.what()), stage_(stage) {}
  StageError(Stage stage, std::string code, const std::string& message)
      : Error(std::move(code), message), stage_(stage) {}

  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Candidate grid and stability sweep of one scene under one configuration.
/// Independent of the sampling seed, so repeated plans may share it.
struct SweepCache {
  CandidateGrid grid;
  SweepResult sweep;
  double wall_time = 0.0;
};

struct PlanOptions {
  std::string scene_id;
  std::vector<std::string> ground_truth;
  std::optional<ZMode> z_mode;        // overrides the config
  std::optional<double> resolution;   // overrides the config
  std::optional<std::uint64_t> seed;  // overrides the config
  std::shared_ptr<const SweepCache> sweep;
};

class Planner {
 public:
  /// `transport` is required only for the llm reasoners. Without a store the
  /// planner keeps runs in memory.
  explicit Planner(PipelineConfig config,
                   std::shared_ptr<const PhysicsBackend> backend = builtin_backend(),
                   std::shared_ptr<ChatTransport> transport = nullptr,
                   std::shared_ptr<RunStore> store = nullptr);

  const PipelineConfig& config() const { return config_; }
  RunStore& store() { return *store_; }
  const PhysicsBackend& backend() const { return *backend_; }

  /// Candidate generation and stability sweep, the expensive shared prefix.
  std::shared_ptr<const SweepCache> sweep(const Scene& scene, const PlanOptions& options = {}) const;
  PlanResult plan(const Scene& scene, const TaskDescription& task, const PlanOptions& options = {});
  /// As plan() but with `config` in place of the planner's configuration.
  PlanResult plan_with(const PipelineConfig& config, const Scene& scene,
                       const TaskDescription& task, const PlanOptions& options = {});
  /// Throws NotFound for an unknown run or rank and AlreadyPlaced on a
  /// second selection.
  PlacementOutcome execute_selection(const std::string& run_id, int rank);

 private:
  ReceptacleDecision reason(const PipelineConfig& config, const SceneSummary& summary,
                            const TaskDescription& task, PlanMetrics& metrics) const;

  PipelineConfig config_;
  std::shared_ptr<const PhysicsBackend> backend_;
  std::shared_ptr<ChatTransport> transport_;
  std::shared_ptr<RunStore> store_;
};

/// True when `point` lies within `radius` of any ground-truth receptacle.
bool is_reasonable(const Scene& scene, const std::vector<std::string>& ground_truth,
                   const Vec3& point, double radius = kDefaultReceptacleRadius);

}  // namespace placeplan
