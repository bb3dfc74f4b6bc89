#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <future>
#include <set>

#include "builders.hpp"
#include "placeplan/bench.hpp"
#include "placeplan/pipeline.hpp"

using namespace placeplan;
using namespace placeplan::testing;

namespace {

class FixedTransport : public ChatTransport {
 public:
  explicit FixedTransport(std::string reply) : reply_(std::move(reply)) {}
  ChatResponse complete(const ChatRequest&) override {
    ++calls;
    return {reply_, 362, 5};
  }
  std::atomic<int> calls{0};

 private:
  std::string reply_;
};

class DownTransport : public ChatTransport {
 public:
  ChatResponse complete(const ChatRequest&) override { throw RemoteError("connection refused", 1); }
};

PlanOptions options_for(const Scenario& s) {
  PlanOptions o;
  o.ground_truth = s.ground_truth;
  o.z_mode = s.z_mode;
  o.resolution = s.resolution;
  return o;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("planning the tray scene ranks points by the green tray") {
  const Scenario s = load_fixture("category_trays.json");
  Planner planner{PipelineConfig{}};
  const PlanResult r = planner.plan(s.scene, *s.task, options_for(s));
  CHECK(r.status == PlanStatus::ok);
  CHECK(r.decision.receptacle_ids == std::vector<std::string>{"tray_green"});
  CHECK(r.metrics.reasoner_used == "rule");
  REQUIRE(r.candidates.candidates.size() == 10);
  CHECK(r.stable_points > 0);
  CHECK(r.stable_fraction == doctest::Approx(double(r.stable_points) / r.grid_points));
  for (int i = 0; i < 3; ++i) CHECK(is_reasonable(s.scene, {"tray_green"}, r.candidates.candidates[i].point));
  REQUIRE(r.density);
  REQUIRE(r.density->grid);
  CHECK(r.density->grid->values.size() == r.density->grid->spec.size());
  CHECK(!r.run_id.empty());
  CHECK(planner.store().run(r.run_id));
}

TEST_CASE("a scene without support has no stable placement") {
  Scene s = load_fixture("flat_table.json").scene;
  s.objects.clear();
  // A full lattice still produces candidates, all of which fall.
  PipelineConfig cfg;
  cfg.z_mode = ZMode::full_lattice;
  cfg.resolution = 0.1;
  Planner planner{cfg};
  const PlanResult r = planner.plan(s, {"Put it down", SimilarityHint::none});
  CHECK(r.status == PlanStatus::no_stable_placement);
  CHECK(r.grid_points > 0);
  CHECK(r.stable_points == 0);
  CHECK(r.candidates.candidates.empty());
  CHECK_FALSE(r.density);
  CHECK(r.metrics.reasoner_used == "none");
}

TEST_CASE("scenes without receptacles fall back to the stability reward") {
  const Scenario s = load_fixture("flat_table.json");
  Planner planner{PipelineConfig{}};
  const PlanResult r = planner.plan(s.scene, *s.task, options_for(s));
  CHECK(r.status == PlanStatus::ok);
  CHECK(r.metrics.reasoner_used == "none");
  CHECK(r.decision.rationale == "no receptacle candidates; stability reward only");
  CHECK(r.stable_fraction == 1.0);
}

TEST_CASE("the llm reasoner feeds the plan and records token usage") {
  const Scenario s = load_fixture("category_trays.json");
  PipelineConfig cfg;
  cfg.reasoner = ReasonerKind::llm;
  auto transport = std::make_shared<FixedTransport>("tray_green");
  Planner planner(cfg, builtin_backend(), transport);
  const PlanResult r = planner.plan(s.scene, *s.task, options_for(s));
  CHECK(r.metrics.reasoner_used == "llm");
  CHECK(r.metrics.reasoning.prompt_tokens + r.metrics.reasoning.completion_tokens == 367);
  CHECK(r.decision.receptacle_ids == std::vector<std::string>{"tray_green"});
  CHECK(transport->calls == 1);
}

TEST_CASE("remote failures fall back to the rule reasoner only when allowed") {
  const Scenario s = load_fixture("category_trays.json");
  PipelineConfig cfg;
  cfg.reasoner = ReasonerKind::llm_with_fallback;
  Planner fallback(cfg, builtin_backend(), std::make_shared<DownTransport>());
  auto opts = options_for(s);
  opts.sweep = fallback.sweep(s.scene, opts);
  const PlanResult r = fallback.plan(s.scene, *s.task, opts);
  CHECK(r.metrics.reasoner_used == "rule");
  CHECK(r.metrics.remote_error.rfind("remote_error: ", 0) == 0);
  CHECK(r.decision.receptacle_ids == std::vector<std::string>{"tray_green"});
  CHECK(r.metrics.stability_wall_time == 0.0);

  cfg.reasoner = ReasonerKind::llm;
  Planner strict(cfg, builtin_backend(), std::make_shared<DownTransport>());
  try {
    strict.plan(s.scene, *s.task, opts);
    FAIL("expected a reasoning failure");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::reasoning);
    CHECK(e.code() == "remote_error");
  }
  Planner unparsable(cfg, builtin_backend(), std::make_shared<FixedTransport>("the blue one?"));
  try {
    unparsable.plan(s.scene, *s.task, opts);
    FAIL("expected a parse failure");
  } catch (const StageError& e) {
    CHECK(e.code() == "completion_parse_error");
  }
}

TEST_CASE("a run is selected once and the outcome agrees with the sweep") {
  const Scenario s = load_fixture("bench/dish_rack_medium.json");
  Planner planner{PipelineConfig{}};
  auto opts = options_for(s);
  opts.sweep = planner.sweep(s.scene, opts);
  const PlanResult r = planner.plan(s.scene, *s.task, opts);
  REQUIRE(!r.candidates.candidates.empty());
  const PlacementOutcome o = planner.execute_selection(r.run_id, 1);
  CHECK(o.stable);
  CHECK(o.reasonable == true);
  CHECK(o.point == r.candidates.candidates[0].point);
  CHECK(planner.store().run(r.run_id)->outcome.has_value());

  auto code_of = [&](const std::string& run, int rank) {
    try {
      planner.execute_selection(run, rank);
    } catch (const StageError& e) {
      CHECK(e.stage() == Stage::selection);
      return e.code();
    }
    return std::string("ok");
  };
  CHECK(code_of(r.run_id, 1) == "already_placed");
  CHECK(code_of(r.run_id, 2) == "already_placed");
  CHECK(code_of("run-999999", 1) == "not_found");
  const PlanResult again = planner.plan(s.scene, *s.task, opts);
  CHECK(code_of(again.run_id, 0) == "not_found");
  CHECK(code_of(again.run_id, 11) == "not_found");
  CHECK(code_of(again.run_id, 2) == "ok");
}

TEST_CASE("a persisted store replays runs and outcomes") {
  const auto dir = fresh_dir("placeplan_store_test");
  const Scenario s = load_fixture("category_trays.json");
  std::string run_id, plan_json;
  std::vector<double> grid;
  {
    auto store = std::make_shared<RunStore>(dir);
    const std::string scene_id = store->add_scene(s);
    Planner planner(PipelineConfig{}, builtin_backend(), nullptr, store);
    auto opts = options_for(s);
    opts.scene_id = scene_id;
    const PlanResult r = planner.plan(s.scene, *s.task, opts);
    run_id = r.run_id;
    plan_json = plan_result_json(r);
    grid = r.density->grid->values;
    planner.execute_selection(run_id, 1);
  }
  RunStore reopened(dir);
  const auto rec = reopened.run(run_id);
  REQUIRE(rec);
  CHECK(plan_result_json(rec->result) == plan_json);
  CHECK(rec->result.density->grid->values == grid);
  REQUIRE(rec->outcome);
  CHECK(rec->outcome->rank == 1);
  CHECK(reopened.placements(rec->scene_id).size() == 1);
  CHECK(reopened.scene(rec->scene_id)->scenario.id == "category_trays");
  CHECK_THROWS_AS(reopened.begin_selection(run_id), AlreadyPlaced);
  // Ids continue after the replayed ones.
  RunRecord next = *rec;
  next.outcome.reset();
  CHECK(reopened.add_run(next) > run_id);
  std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent plans on a shared planner are independent") {
  const Scenario trays = load_fixture("category_trays.json");
  const Scenario table = load_fixture("flat_table.json");
  Planner planner{PipelineConfig{}};
  auto t_opts = options_for(trays);
  t_opts.sweep = planner.sweep(trays.scene, t_opts);
  const PlanResult reference = planner.plan(trays.scene, *trays.task, t_opts);

  std::vector<std::future<PlanResult>> futures;
  for (int i = 0; i < 6; ++i) {
    futures.push_back(std::async(std::launch::async, [&, i] {
      if (i % 2) return planner.plan(table.scene, *table.task, options_for(table));
      return planner.plan(trays.scene, *trays.task, t_opts);
    }));
  }
  std::set<std::string> ids{reference.run_id};
  for (int i = 0; i < 6; ++i) {
    const PlanResult r = futures[i].get();
    ids.insert(r.run_id);
    if (i % 2 == 0) {
      REQUIRE(r.candidates.candidates.size() == reference.candidates.candidates.size());
      for (std::size_t k = 0; k < r.candidates.candidates.size(); ++k)
        CHECK(r.candidates.candidates[k].point == reference.candidates.candidates[k].point);
    }
  }
  CHECK(ids.size() == 7);
}

TEST_CASE("benchmark follows the protocol and is deterministic") {
  const std::vector<Scenario> suite = {load_fixture("category_trays.json")};
  PipelineConfig cfg;
  cfg.reasoner = ReasonerKind::llm;
  auto transport = std::make_shared<FixedTransport>("tray_green");
  Planner planner(cfg, builtin_backend(), transport);
  const BenchReport a = run_benchmark(planner, suite, 3);
  const BenchReport b = run_benchmark(planner, suite, 3);
  CHECK(a.to_json(false) == b.to_json(false));
  REQUIRE(a.rows.size() == 1);
  const BenchRow& row = a.rows[0];
  CHECK(row.repetitions == 3);
  CHECK(row.sample_k == 10);
  CHECK(row.candidates_mean == 10.0);
  CHECK(row.tokens_mean == 367.0);
  CHECK(row.sta_sr == 1.0);
  CHECK(row.rea_sr == 1.0);
  CHECK(transport->calls == 6);
  CHECK(a.to_json(false).find("wall_time") == std::string::npos);
  CHECK(a.to_json(true).find("wall_time_mean") != std::string::npos);

  CHECK_THROWS_AS(run_benchmark(planner, suite, 0), ValidationError);
  std::vector<Scenario> no_truth = {load_fixture("flat_table.json")};
  CHECK_THROWS_AS(run_benchmark(planner, no_truth, 1), ValidationError);
}

TEST_CASE("the shipped suite loads in file-name order") {
  const auto suite = load_suite(std::string(PLACEPLAN_SCENARIO_DIR) + "/bench");
  REQUIRE(suite.size() == 6);
  CHECK(suite.front().id == "bookshelf_three_tier");
  CHECK(suite.back().id == "dish_rack_small");
  for (const auto& s : suite) CHECK(!s.ground_truth.empty());
}
