// Acceptance gate: one PASS/FAIL line per criterion. Time limits and
// tolerances are fixed here; the exit status is non-zero if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "placeplan/bench.hpp"
#include "placeplan/pipeline.hpp"

using namespace placeplan;
using namespace placeplan::testing;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  double limit_seconds;  // 0: untimed
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

CandidateGrid explicit_grid(std::vector<Vec3> pts) {
  CandidateGrid g;
  g.points = std::move(pts);
  g.source = CandidateSource::explicit_points;
  return g;
}

PlanOptions options_for(const Scenario& s) {
  PlanOptions o;
  o.ground_truth = s.ground_truth;
  o.z_mode = s.z_mode;
  o.resolution = s.resolution;
  return o;
}

class UsageTransport : public ChatTransport {
 public:
  explicit UsageTransport(std::string reply) : reply_(std::move(reply)) {}
  ChatResponse complete(const ChatRequest&) override { return {reply_, 362, 5}; }

 private:
  std::string reply_;
};

Verdict box_on_plane() {
  const BoxOnPlane oracle;
  const auto pts = oracle.lattice(20);
  const SweepResult r =
      sweep_stability(*builtin_backend(), oracle.scene(), explicit_grid(pts), SimConfig{});
  int mismatches = 0, stable = 0;
  for (const auto& d : r.diagnostics) {
    mismatches += d.included != oracle.stable(d.point.x(), d.point.y()) ? 1 : 0;
    stable += d.included ? 1 : 0;
  }
  return {mismatches == 0 && stable > 0 && stable < 400,
          fmt("%.0f mismatches over 400 points, %.0f stable", mismatches, stable)};
}

Verdict tipping() {
  // Table edge at x = 0.3, cube half width 0.05.
  const Scenario s = load_fixture("table_edge.json");
  const std::vector<Vec3> pts = {Vec3(0.31, 0, 0.25), Vec3(0.0, 0, 0.25), Vec3(0.30, 0, 0.25),
                                 Vec3(0.30 - 2e-4, 0, 0.25)};
  const SweepResult r = sweep_stability(*builtin_backend(), s.scene, explicit_grid(pts), SimConfig{});
  // The COM exactly on the edge has zero margin, below the 1e-4 m rest margin.
  const bool overhang = !r.diagnostics[0].included;
  const bool centered = r.diagnostics[1].included;
  const bool half = !r.diagnostics[2].included;
  const auto backend = builtin_backend();
  auto inside = backend->place(s.scene, s.scene.placement_object, pts[3]);
  backend->step(*inside, 0.005);
  auto edge = backend->place(s.scene, s.scene.placement_object, pts[2]);
  backend->step(*edge, 0.005);
  const bool margin_rule = backend->at_rest(*inside) && !backend->at_rest(*edge);
  std::ostringstream d;
  d << "60% overhang " << (overhang ? "unstable" : "STABLE") << ", centered "
    << (centered ? "stable" : "UNSTABLE") << ", 50% " << (half ? "unstable" : "STABLE")
    << ", rest at margin 2e-4 vs 0: " << (margin_rule ? "yes/no" : "WRONG");
  return {overhang && centered && half && margin_rule, d.str()};
}

double fraction_of(const std::string& fixture) {
  const Scenario s = load_fixture(fixture);
  Planner planner{PipelineConfig{}};
  return planner.sweep(s.scene, options_for(s))->sweep.stable_fraction;
}

Verdict stable_fraction_contrast() {
  const Scenario rack = load_fixture("bench/dish_rack_medium.json");
  const double res = rack.resolution.value_or(0.0);
  const double f_rack = fraction_of("bench/dish_rack_medium.json");
  const double f_table = fraction_of("flat_table.json");
  return {res == 0.01 && f_rack < 0.2 && f_table > 0.9,
          fmt("dish rack %.3f (< 0.2) at %.2f m, flat table %.3f (> 0.9)", f_rack, res, f_table)};
}

Verdict slot_monotonicity() {
  std::size_t n[3];
  const char* files[3] = {"bench/dish_rack_small.json", "bench/dish_rack_medium.json",
                          "bench/dish_rack_large.json"};
  for (int i = 0; i < 3; ++i) {
    const Scenario s = load_fixture(files[i]);
    Planner planner{PipelineConfig{}};
    n[i] = planner.sweep(s.scene, options_for(s))->sweep.stable.entries.size();
  }
  return {n[0] <= n[1] && n[1] <= n[2],
          fmt("|P_s| small %.0f <= medium %.0f <= large %.0f", n[0], n[1], n[2])};
}

Verdict kde_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 0.5), w(0.0, 1.0), q(-0.1, 0.6);
  WeightedPoints s;
  for (int i = 0; i < 50; ++i) {
    s.points.emplace_back(u(rng), u(rng), u(rng));
    s.weights.push_back(w(rng));
  }
  const KdeConfig cfg;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vec3 x(q(rng), q(rng), q(rng));
    long double sum = 0;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      long double d2 = 0;
      for (int a = 0; a < 3; ++a) d2 += (long double)(x[a] - s.points[i][a]) * (x[a] - s.points[i][a]);
      sum += s.weights[i] * std::exp(-d2 / (2.0L * cfg.bandwidth * cfg.bandwidth));
    }
    const double want = static_cast<double>(sum / (50.0L * cfg.bandwidth));
    const double got = kde_evaluate(s, cfg, x);
    const double rel = want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
  }
  return {worst <= 1e-9, fmt("max relative error %.3g (<= 1e-9)", worst)};
}

Verdict beta_endpoints() {
  const Scenario s = load_fixture("category_trays.json");
  const PipelineConfig cfg;
  Planner planner{cfg};
  const auto cache = planner.sweep(s.scene, options_for(s));
  const StableSet& stable = cache->sweep.stable;
  const SceneSummary summary = summarize_scene(s.scene);
  const ReceptacleSet rec = receptacle_points(stable, rule_reason(summary, *s.task), summary);
  const GridSpec spec = GridSpec::covering(s.scene.workspace, *s.resolution);

  // Stability-only field built directly from the normalized rewards.
  WeightedPoints only;
  for (const auto& e : stable.entries) {
    only.points.push_back(e.point);
    only.weights.push_back(e.reward_norm);
  }
  const DensityGrid reference = evaluate_grid(only, cfg.kde, spec);
  const DensityField one = build_density(stable, rec, {1.0}, cfg.kde, spec);
  double diff = 0.0;
  for (std::size_t i = 0; i < reference.values.size(); ++i)
    diff = std::max(diff, std::abs(one.grid->values[i] - reference.values[i]));

  const DensityField zero = build_density(stable, rec, {0.0}, cfg.kde, spec);
  const Vec3 peak = zero.grid->spec.point(zero.grid->argmax());
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& e : rec.entries)
    if (e.reward == 1) nearest = std::min(nearest, (e.point - peak).norm());

  return {diff <= 1e-12 && nearest <= cfg.kde.bandwidth && cfg.blend.beta == 0.1,
          fmt("beta=1 max diff %.3g (<= 1e-12); beta=0 argmax %.4f m from r_r=1 (<= h); default beta %.2f",
              diff, nearest, cfg.blend.beta)};
}

// Shared by the reasonableness, protocol and determinism criteria.
std::string report_json(const BenchReport& r) { return r.to_json(false); }

BenchReport tray_bench() {
  Planner planner{PipelineConfig{}};
  return run_benchmark(planner, {load_fixture("category_trays.json")}, planner.config().repetitions);
}

Verdict reasonableness(const BenchReport& r) {
  const BenchRow& row = r.rows.at(0);
  return {row.rea_sr == 1.0 && row.sta_sr == 1.0 && row.repetitions == 20,
          fmt("Rea %.2f, Sta %.2f over %.0f seeded repetitions", row.rea_sr, row.sta_sr, row.repetitions)};
}

Verdict protocol(const BenchReport& r) {
  const PipelineConfig defaults;
  const BenchRow& row = r.rows.at(0);
  return {defaults.sample_k == 10 && defaults.repetitions == 20 && r.sample_k == 10 && r.repetitions == 20 &&
              row.candidates_mean == 10.0,
          fmt("report sample_k %.0f, repetitions %.0f, mean candidates per plan %.1f", r.sample_k,
              r.repetitions, row.candidates_mean)};
}

Verdict token_plumbing() {
  // A coarse tray scene keeps the sweep negligible; the check is the usage path.
  Scenario s = load_fixture("category_trays.json");
  s.resolution = 0.05;
  PipelineConfig cfg;
  cfg.reasoner = ReasonerKind::llm;
  Planner planner(cfg, builtin_backend(), std::make_shared<UsageTransport>("tray_green"));
  const BenchReport r = run_benchmark(planner, {s}, 3);
  const double mean = r.rows.at(0).tokens_mean;
  return {mean == 367.0, fmt("token mean %.6g (== 367)", mean)};
}

Verdict determinism(const BenchReport& first) {
  const std::string a = report_json(first);
  const std::string b = report_json(tray_bench());
  return {a == b && a.find("wall_time") == std::string::npos,
          fmt("%.0f-byte reports without timing, ", static_cast<double>(a.size())) +
              (a == b ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  BenchReport trays;
  const std::vector<Criterion> criteria = {
      {"stability-oracle-box-on-plane", 10.0, box_on_plane},
      {"tipping-correctness", 1.0, tipping},
      {"stable-fraction-rack-vs-table", 60.0, stable_fraction_contrast},
      {"slot-gap-monotonicity", 120.0, slot_monotonicity},
      {"kde-oracle", 1.0, kde_oracle},
      {"beta-endpoints", 5.0, beta_endpoints},
      {"end-to-end-reasonableness", 120.0,
       [&] {
         trays = tray_bench();
         return reasonableness(trays);
       }},
      {"protocol-fidelity", 0.0, [&] { return protocol(trays); }},
      {"token-metrics-plumbing", 1.0, token_plumbing},
      {"determinism", 0.0, [&] { return determinism(trays); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_seconds <= 0.0 || dt < c.limit_seconds;
    const bool pass = v.ok && in_time;
    failures += pass ? 0 : 1;
    std::string timing = fmt("%.3f s", dt);
    if (c.limit_seconds > 0.0) timing += fmt(" < %.0f s", c.limit_seconds) + (in_time ? "" : " EXCEEDED");
    std::printf("%s %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
