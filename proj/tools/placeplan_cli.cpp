#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "placeplan/bench.hpp"
#include "placeplan/pipeline.hpp"
#include "placeplan/scene_io.hpp"
#include "placeplan/service.hpp"

using namespace placeplan;

namespace {

PipelineConfig load_config(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config_file(path);
}

std::shared_ptr<ChatTransport> transport_for(const PipelineConfig& cfg) {
  if (cfg.reasoner == ReasonerKind::rule) return nullptr;
  return std::make_shared<HttpChatTransport>(cfg.llm);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", "cannot write '" + path.string() + "'");
  out << content;
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability- and task-aware object placement planner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string store_dir;

  auto* plan = app.add_subcommand("plan", "Plan candidate placements for a scene file");
  std::string scene_file, task_text, reasoner, out_dir;
  std::uint64_t seed = 0;
  plan->add_option("scene-file", scene_file, "Scene or scenario JSON")->required()->check(CLI::ExistingFile);
  plan->add_option("--task", task_text, "Task description (defaults to the scenario's task)");
  plan->add_option("--config", config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  plan->add_option("--reasoner", reasoner, "rule or llm (llm falls back to rule on remote failure)")
      ->check(CLI::IsMember({"rule", "llm", "llm_strict"}));
  auto* seed_opt = plan->add_option("--seed", seed, "Sampling seed");
  plan->add_option("--out", out_dir, "Directory for the run store, plan.json and density grids");

  auto* bench = app.add_subcommand("bench", "Run the scenario benchmark suite");
  std::string suite_dir, bench_out;
  int reps = 0;
  bool no_timing = false;
  bench->add_option("--suite", suite_dir, "Directory of scenario files")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--reps", reps, "Repetitions per scenario (default from config)");
  bench->add_option("--config", config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Write the report here instead of stdout");
  bench->add_flag("--no-timing", no_timing, "Omit wall-time columns");

  auto* serve = app.add_subcommand("serve", "Serve the REST API");
  std::string bind = "127.0.0.1:8080";
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--config", config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  serve->add_option("--store", store_dir, "Run store directory (in-memory when omitted)");

  auto* exp = app.add_subcommand("export-density", "Write a stored run's density grid");
  std::string run_id, format = "binary", exp_out;
  exp->add_option("run-id", run_id)->required();
  exp->add_option("--format", format)->check(CLI::IsMember({"text", "binary"}));
  exp->add_option("--store", store_dir, "Run store directory")->required()->check(CLI::ExistingDirectory);
  exp->add_option("--out", exp_out, "Output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) {
      PipelineConfig cfg = load_config(config_path);
      if (reasoner == "rule") cfg.reasoner = ReasonerKind::rule;
      if (reasoner == "llm") cfg.reasoner = ReasonerKind::llm_with_fallback;
      if (reasoner == "llm_strict") cfg.reasoner = ReasonerKind::llm;
      const Scenario scenario = load_scenario_file(scene_file);
      TaskDescription task = scenario.task.value_or(TaskDescription{});
      if (!task_text.empty()) task.text = task_text;
      if (task.text.empty()) throw ValidationError("no task: pass --task or use a scenario file with one");
      std::shared_ptr<RunStore> store;
      if (!out_dir.empty()) store = std::make_shared<RunStore>(std::filesystem::path(out_dir));
      Planner planner(cfg, builtin_backend(), transport_for(cfg), store);
      PlanOptions options;
      options.ground_truth = scenario.ground_truth;
      options.z_mode = scenario.z_mode;
      options.resolution = scenario.resolution;
      if (*seed_opt) options.seed = seed;
      const PlanResult result = planner.plan(scenario.scene, task, options);
      const std::string doc = plan_result_json(result, 2);
      if (out_dir.empty()) {
        std::cout << doc << '\n';
      } else {
        const std::filesystem::path dir(out_dir);
        write_file(dir / (result.run_id + ".plan.json"), doc + "\n");
        if (result.density && result.density->grid) {
          write_file(dir / (result.run_id + ".density.bin"), grid_to_binary(*result.density->grid));
          write_file(dir / (result.run_id + ".density.csv"), grid_to_text(*result.density->grid));
        }
        std::cout << result.run_id << '\n';
      }
      return result.status == PlanStatus::ok ? 0 : 3;
    }
    if (*bench) {
      const PipelineConfig cfg = load_config(config_path);
      Planner planner(cfg, builtin_backend(), transport_for(cfg));
      const BenchReport report = run_benchmark(planner, load_suite(suite_dir), reps > 0 ? reps : cfg.repetitions);
      const std::string doc = report.to_json(!no_timing, 2) + "\n";
      if (bench_out.empty()) {
        std::cout << doc;
      } else {
        write_file(bench_out, doc);
      }
      return 0;
    }
    if (*serve) {
      const PipelineConfig cfg = load_config(config_path);
      std::shared_ptr<RunStore> store;
      if (!store_dir.empty()) store = std::make_shared<RunStore>(std::filesystem::path(store_dir));
      auto planner = std::make_shared<Planner>(cfg, builtin_backend(), transport_for(cfg), store);
      const auto [host, port] = parse_bind_address(bind);
      Service service(planner);
      const int bound = service.bind(host, port);
      std::cerr << "listening on " << host << ":" << bound << '\n';
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      service.run();
      g_service = nullptr;
      return 0;
    }
    if (*exp) {
      RunStore store{std::filesystem::path(store_dir)};
      const auto record = store.run(run_id);
      if (!record) throw NotFound("unknown run '" + run_id + "'");
      const auto& field = record->result.density;
      if (!field || !field->grid) throw NotFound("run '" + run_id + "' has no density grid");
      const std::string data = format == "text" ? grid_to_text(*field->grid) : grid_to_binary(*field->grid);
      if (exp_out.empty()) {
        std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
      } else {
        write_file(exp_out, data);
      }
      return 0;
    }
  } catch (const StageError& e) {
    std::cerr << "error [" << to_string(e.stage()) << "/" << e.code() << "]: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
