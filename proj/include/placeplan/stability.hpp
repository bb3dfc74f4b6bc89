#pragma once

#include <optional>
#include <string>
#include <vector>

#include "placeplan/physics.hpp"
#include "placeplan/scene.hpp"

namespace placeplan {

enum class SigmaMode { fixed_tolerance, series_variance };

std::string to_string(SigmaMode mode);
SigmaMode sigma_mode_from_string(const std::string& s);

struct Tilt {
  Vec3 axis;     // unit, horizontal
  double angle;  // rad, in (0, pi/2)
  bool operator==(const Tilt&) const = default;
};

struct SimConfig {
  int steps = 200;
  double dt = 0.005;
  double stability_tolerance = 0.05;  // sigma, in quaternion-scalar units
  SigmaMode sigma_mode = SigmaMode::fixed_tolerance;
  std::vector<Tilt> perturbation_tilts = default_tilts();
  /// 1-based step at which each tilt is applied; steps / 2 when unset.
  std::optional<int> perturbation_step;
  /// Reward low swing instead of high swing: 100 * (1 - (q_max - q_min)).
  bool invert_reward = false;

  static std::vector<Tilt> default_tilts();
  int tilt_step() const { return perturbation_step.value_or(steps / 2); }
  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct OrientationTrace {
  Vec3 point;
  std::vector<double> samples;  // q(t), t = 1..T, canonical scalar components
  bool settled = false;  // every perturbation run ended at rest
  bool penetrated = false;

  /// max_t |q(t) - q(1)|
  double max_deviation() const;
};

struct StableEntry {
  Vec3 point;
  double reward_raw = 0.0;
  double reward_norm = 0.0;
};

struct StableSet {
  std::vector<StableEntry> entries;
  SimConfig config;
};

OrientationTrace simulate_placement(const PhysicsBackend& backend, const Scene& scene,
                                    const Vec3& point, const SimConfig& cfg);

/// Membership test for one trace, shared by stable_set and re-simulation.
bool is_stable(const OrientationTrace& trace, const SimConfig& cfg);
double stability_reward(const OrientationTrace& trace, const SimConfig& cfg);

StableSet stable_set(const std::vector<OrientationTrace>& traces, const SimConfig& cfg);

struct PointDiagnostic {
  Vec3 point;
  bool included = false;
  double reward_raw = 0.0;
  double max_deviation = 0.0;
  bool settled = false;
  bool penetrated = false;
};

struct SweepResult {
  StableSet stable;
  std::vector<PointDiagnostic> diagnostics;  // grid order
  double stable_fraction = 0.0;
};

/// Simulates every grid point. `threads` = 0 picks the hardware concurrency.
SweepResult sweep_stability(const PhysicsBackend& backend, const Scene& scene,
                            const CandidateGrid& grid, const SimConfig& cfg,
                            unsigned threads = 0);

/// One delimited row per point: x,y,z,included,reward_raw,max_deviation,settled,penetrated
std::string diagnostics_csv(const std::vector<PointDiagnostic>& rows);

}  // namespace placeplan
