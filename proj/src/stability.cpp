#include "placeplan/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "placeplan/errors.hpp"

namespace placeplan {

std::string to_string(SigmaMode mode) {
  return mode == SigmaMode::fixed_tolerance ? "fixed_tolerance" : "series_variance";
}

SigmaMode sigma_mode_from_string(const std::string& s) {
  if (s == "fixed_tolerance") return SigmaMode::fixed_tolerance;
  if (s == "series_variance") return SigmaMode::series_variance;
  throw ValidationError("unknown sigma_mode '" + s + "'");
}

std::vector<Tilt> SimConfig::default_tilts() {
  return {{Vec3::UnitX(), 0.05}, {-Vec3::UnitX(), 0.05}, {Vec3::UnitY(), 0.05},
          {-Vec3::UnitY(), 0.05}};
}

void SimConfig::validate() const {
  if (steps < 2) throw ValidationError("sim.steps must be at least 2");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("sim.dt must be positive");
  if (!(stability_tolerance > 0.0) || !std::isfinite(stability_tolerance))
    throw ValidationError("sim.stability_tolerance must be positive");
  const int k = tilt_step();
  if (k < 1 || k > steps)
    throw ValidationError("sim.perturbation_step must lie in [1, steps]");
  for (const auto& t : perturbation_tilts) {
    if (!is_finite(t.axis) || std::abs(t.axis.norm() - 1.0) > 1e-9 || std::abs(t.axis.z()) > 1e-9)
      throw ValidationError("perturbation tilt axes must be horizontal unit vectors");
    if (!(t.angle > 0.0 && t.angle < 0.5 * std::numbers::pi))
      throw ValidationError("perturbation tilt angles must lie in (0, pi/2)");
  }
}

double OrientationTrace::max_deviation() const {
  double worst = 0.0;
  if (samples.empty()) return worst;
  for (double q : samples) worst = std::max(worst, std::abs(q - samples.front()));
  return worst;
}

namespace {

double sample_of(const PhysicsBackend& backend, const BodyState& s) {
  return backend.orientation(s).w();
}

}  // namespace

OrientationTrace simulate_placement(const PhysicsBackend& backend, const Scene& scene,
                                    const Vec3& point, const SimConfig& cfg) {
  cfg.validate();
  if (!is_finite(point) || !scene.workspace.contains(point, 1e-9))
    throw ContractViolation("placement point lies outside the workspace");
  OrientationTrace trace;
  trace.point = point;
  trace.samples.reserve(cfg.steps);

  auto state = backend.place(scene, scene.placement_object, point);
  if (backend.penetrating(*state)) {
    trace.penetrated = true;
    trace.samples.assign(cfg.steps, sample_of(backend, *state));
    return trace;
  }

  const int k = cfg.tilt_step();
  for (int t = 1; t < k; ++t) {
    if (t > 1) backend.step(*state, cfg.dt);
    trace.samples.push_back(sample_of(backend, *state));
  }
  if (cfg.perturbation_tilts.empty()) {
    for (int t = k; t <= cfg.steps; ++t) {
      if (t > 1) backend.step(*state, cfg.dt);
      trace.samples.push_back(sample_of(backend, *state));
    }
    trace.settled = backend.at_rest(*state);
    return trace;
  }

  const std::vector<double> prefix = trace.samples;
  bool have_best = false;
  bool all_settled = true;
  for (const auto& tilt : cfg.perturbation_tilts) {
    OrientationTrace run;
    run.point = point;
    run.samples = prefix;
    auto s = state->clone();
    for (int t = k; t <= cfg.steps; ++t) {
      if (t > 1) backend.step(*s, cfg.dt);
      if (t == k) backend.tilt(*s, tilt.axis, tilt.angle);
      run.samples.push_back(sample_of(backend, *s));
    }
    run.settled = backend.at_rest(*s);
    all_settled = all_settled && run.settled;
    // Worst case over tilts; the first run wins ties.
    if (!have_best || run.max_deviation() > trace.max_deviation()) {
      trace = std::move(run);
      have_best = true;
    }
  }
  trace.settled = all_settled;
  return trace;
}

bool is_stable(const OrientationTrace& trace, const SimConfig& cfg) {
  if (trace.penetrated || !trace.settled || trace.samples.empty()) return false;
  double bound = cfg.stability_tolerance * cfg.stability_tolerance;
  if (cfg.sigma_mode == SigmaMode::series_variance) {
    const double n = static_cast<double>(trace.samples.size());
    double mean = 0.0;
    for (double q : trace.samples) mean += q;
    mean /= n;
    double ss = 0.0;
    for (double q : trace.samples) ss += (q - mean) * (q - mean);
    bound = n > 1.0 ? ss / (n - 1.0) : 0.0;
  }
  const double q1 = trace.samples.front();
  return std::all_of(trace.samples.begin(), trace.samples.end(),
                     [&](double q) { return (q - q1) * (q - q1) <= bound; });
}

double stability_reward(const OrientationTrace& trace, const SimConfig& cfg) {
  const auto [lo, hi] = std::minmax_element(trace.samples.begin(), trace.samples.end());
  const double swing = *hi - *lo;
  return cfg.invert_reward ? 100.0 * (1.0 - swing) : 100.0 * swing;
}

StableSet stable_set(const std::vector<OrientationTrace>& traces, const SimConfig& cfg) {
  if (traces.empty()) throw ContractViolation("stable_set needs at least one trace");
  const std::size_t T = traces.front().samples.size();
  for (const auto& t : traces) {
    if (t.samples.size() != T) throw ContractViolation("traces have mixed lengths");
  }

  StableSet set;
  set.config = cfg;
  for (const auto& t : traces) {
    if (!is_stable(t, cfg)) continue;
    set.entries.push_back({t.point, stability_reward(t, cfg), 0.0});
  }
  if (set.entries.empty()) return set;
  double lo = set.entries.front().reward_raw;
  double hi = lo;
  for (const auto& e : set.entries) {
    lo = std::min(lo, e.reward_raw);
    hi = std::max(hi, e.reward_raw);
  }
  for (auto& e : set.entries) e.reward_norm = hi > lo ? (e.reward_raw - lo) / (hi - lo) : 1.0;
  return set;
}

SweepResult sweep_stability(const PhysicsBackend& backend, const Scene& scene,
                            const CandidateGrid& grid, const SimConfig& cfg, unsigned threads) {
  if (grid.points.empty()) throw ContractViolation("candidate grid is empty");
  cfg.validate();
  validate(scene);
  const std::size_t n = grid.points.size();
  std::vector<OrientationTrace> traces(n);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        traces[i] = simulate_placement(backend, scene, grid.points[i], cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.stable = stable_set(traces, cfg);
  result.diagnostics.reserve(n);
  for (const auto& t : traces) {
    PointDiagnostic d;
    d.point = t.point;
    d.included = is_stable(t, cfg);
    d.reward_raw = stability_reward(t, cfg);
    d.max_deviation = t.max_deviation();
    d.settled = t.settled;
    d.penetrated = t.penetrated;
    result.diagnostics.push_back(d);
  }
  result.stable_fraction = static_cast<double>(result.stable.entries.size()) / static_cast<double>(n);
  return result;
}

std::string diagnostics_csv(const std::vector<PointDiagnostic>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "x,y,z,included,reward_raw,max_deviation,settled,penetrated\n";
  for (const auto& r : rows) {
    out << r.point.x() << ',' << r.point.y() << ',' << r.point.z() << ',' << (r.included ? 1 : 0)
        << ',' << r.reward_raw << ',' << r.max_deviation << ',' << (r.settled ? 1 : 0) << ','
        << (r.penetrated ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace placeplan
