#include "placeplan/pipeline.hpp"

#include <chrono>

#include "placeplan/candidates.hpp"
#include "placeplan/reasoning.hpp"

namespace placeplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs `fn`, tagging library errors with `stage`.
template <class Fn>
auto staged(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

}  // namespace

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::ingest:
      return "ingest";
    case Stage::stability:
      return "stability";
    case Stage::reasoning:
      return "reasoning";
    case Stage::density:
      return "density";
    case Stage::selection:
      return "selection";
  }
  return "ingest";
}

bool is_reasonable(const Scene& scene, const std::vector<std::string>& ground_truth,
                   const Vec3& point, double radius) {
  const SceneSummary summary = summarize_scene(scene);
  for (const auto& id : ground_truth) {
    Aabb bounds;
    if (const auto* r = summary.find_receptacle(id)) {
      bounds = r->bounds;
    } else if (const auto* obj = scene.find(id)) {
      bounds = object_aabb(*obj);
    } else {
      throw ValidationError("ground truth names unknown receptacle '" + id + "'");
    }
    if (bounds.distance(point) <= radius) return true;
  }
  return false;
}

Planner::Planner(PipelineConfig config, std::shared_ptr<const PhysicsBackend> backend,
                 std::shared_ptr<ChatTransport> transport, std::shared_ptr<RunStore> store)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      transport_(std::move(transport)),
      store_(store ? std::move(store) : std::make_shared<RunStore>()) {
  config_.validate();
  if (!backend_) throw ContractViolation("planner needs a physics backend");
}

std::shared_ptr<const SweepCache> Planner::sweep(const Scene& scene, const PlanOptions& options) const {
  const auto t0 = Clock::now();
  auto cache = std::make_shared<SweepCache>();
  cache->grid = staged(Stage::ingest, [&] {
    validate(scene);
    return generate_candidates(scene, options.resolution.value_or(config_.resolution),
                               options.z_mode.value_or(config_.z_mode), config_.point_cap);
  });
  if (cache->grid.points.empty()) {
    cache->sweep.stable.config = config_.sim;
  } else {
    cache->sweep = staged(Stage::stability, [&] {
      return sweep_stability(*backend_, scene, cache->grid, config_.sim, config_.threads);
    });
  }
  cache->wall_time = seconds_since(t0);
  return cache;
}

PlanResult Planner::plan(const Scene& scene, const TaskDescription& task, const PlanOptions& options) {
  return plan_with(config_, scene, task, options);
}

PlanResult Planner::plan_with(const PipelineConfig& config, const Scene& scene,
                              const TaskDescription& task, const PlanOptions& options) {
  const auto t0 = Clock::now();
  staged(Stage::ingest, [&] {
    config.validate();
    validate(scene);
  });

  PlanResult result;
  std::shared_ptr<const SweepCache> cache = options.sweep;
  if (!cache) {
    if (&config == &config_) {
      cache = sweep(scene, options);
    } else {
      Planner scoped(config, backend_, transport_, store_);
      cache = scoped.sweep(scene, options);
    }
    result.metrics.stability_wall_time = cache->wall_time;
  }
  const StableSet& stable = cache->sweep.stable;
  result.grid_points = cache->grid.points.size();
  result.stable_points = stable.entries.size();
  result.stable_fraction = cache->sweep.stable_fraction;
  result.candidates.seed = options.seed.value_or(config.seed);
  result.candidates.min_separation = config.min_separation;
  result.candidates.requested = config.sample_k;

  if (stable.entries.empty()) {
    result.status = PlanStatus::no_stable_placement;
    result.decision.rationale = "no stable placement";
    result.metrics.reasoner_used = "none";
  } else {
    const SceneSummary summary = staged(Stage::reasoning, [&] { return summarize_scene(scene); });
    ReceptacleSet receptacles;
    if (summary.receptacles.empty()) {
      result.decision.rationale = "no receptacle candidates; stability reward only";
      result.metrics.reasoner_used = "none";
      for (const auto& e : stable.entries) receptacles.entries.push_back({e.point, 0});
      receptacles.radius = config.receptacle_radius;
    } else {
      result.decision = reason(config, summary, task, result.metrics);
      result.metrics.reasoning = result.decision.metrics;
      receptacles = staged(Stage::reasoning, [&] {
        return receptacle_points(stable, result.decision, summary, config.receptacle_radius);
      });
    }
    const auto td = Clock::now();
    staged(Stage::density, [&] {
      const GridSpec spec = GridSpec::covering(
          scene.workspace, options.resolution.value_or(config.resolution), config.density_cells);
      auto field = std::make_shared<DensityField>(
          build_density(stable, receptacles, config.blend, config.kde, spec, config.threads));
      result.candidates = sample_candidates(*field, config.sample_k, config.min_separation,
                                            options.seed.value_or(config.seed));
      result.density = std::move(field);
    });
    result.metrics.density_wall_time = seconds_since(td);
  }
  result.metrics.total_wall_time = seconds_since(t0);

  RunRecord record;
  record.scene_id = options.scene_id;
  record.scene = scene;
  record.task = task;
  record.config = config;
  if (options.seed) record.config.seed = *options.seed;
  if (options.z_mode) record.config.z_mode = *options.z_mode;
  if (options.resolution) record.config.resolution = *options.resolution;
  record.ground_truth = options.ground_truth;
  record.result = result;
  result.run_id = store_->add_run(std::move(record));
  return result;
}

ReceptacleDecision Planner::reason(const PipelineConfig& config, const SceneSummary& summary,
                                   const TaskDescription& task, PlanMetrics& metrics) const {
  if (config.reasoner == ReasonerKind::rule) {
    metrics.reasoner_used = "rule";
    return staged(Stage::reasoning, [&] { return rule_reason(summary, task); });
  }
  try {
    if (!transport_) throw RemoteError("no chat transport configured", 0);
    const PromptConfig prompts =
        config.prompt_dir.empty() ? PromptConfig::defaults() : PromptConfig::load(config.prompt_dir);
    const RemoteChatClient client(transport_, config.llm.model, config.llm.max_attempts);
    metrics.reasoner_used = "llm";
    return llm_reason(client, summary, task, prompts);
  } catch (const Error& e) {
    const bool recoverable = dynamic_cast<const RemoteError*>(&e) != nullptr ||
                             dynamic_cast<const CompletionParseError*>(&e) != nullptr;
    if (config.reasoner != ReasonerKind::llm_with_fallback || !recoverable)
      throw StageError(Stage::reasoning, e);
    metrics.remote_error = e.code() + ": " + e.what();
    metrics.reasoner_used = "rule";
    return staged(Stage::reasoning, [&] { return rule_reason(summary, task); });
  }
}

PlacementOutcome Planner::execute_selection(const std::string& run_id, int rank) {
  const auto record = store_->run(run_id);
  if (!record) throw StageError(Stage::selection, NotFound("unknown run '" + run_id + "'"));
  const auto& items = record->result.candidates.candidates;
  if (rank < 1 || rank > static_cast<int>(items.size()))
    throw StageError(Stage::selection,
                     NotFound("run '" + run_id + "' has no candidate of rank " + std::to_string(rank)));
  staged(Stage::selection, [&] { store_->begin_selection(run_id); });
  try {
    const Vec3 point = items[rank - 1].point;
    const OrientationTrace trace = simulate_placement(*backend_, record->scene, point, record->config.sim);
    PlacementOutcome outcome;
    outcome.run_id = run_id;
    outcome.rank = rank;
    outcome.point = point;
    outcome.stable = is_stable(trace, record->config.sim);
    outcome.settled = trace.settled;
    outcome.deviation = trace.max_deviation();
    if (!record->ground_truth.empty())
      outcome.reasonable =
          is_reasonable(record->scene, record->ground_truth, point, record->config.receptacle_radius);
    store_->finish_selection(outcome);
    return outcome;
  } catch (const Error& e) {
    store_->abort_selection(run_id);
    throw StageError(Stage::selection, e);
  }
}

}  // namespace placeplan
