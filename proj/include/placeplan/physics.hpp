#pragma once

#include <memory>
#include <string>

#include "placeplan/geometry.hpp"
#include "placeplan/scene.hpp"

namespace placeplan {

/// Backend-owned simulation state of one placed object. Each simulation run
/// owns its state exclusively; clone() forks a run.
class BodyState {
 public:
  virtual ~BodyState() = default;
  virtual std::unique_ptr<BodyState> clone() const = 0;
};

/// Simulator abstraction used by the stability sweep. Implementations must
/// be deterministic: the same state and inputs yield the same next state.
class PhysicsBackend {
 public:
  virtual ~PhysicsBackend() = default;

  virtual std::string name() const = 0;

  /// Instantiates `object` with its origin at `point` and its scene-document
  /// orientation. Scene objects are frozen colliders for the duration.
  virtual std::unique_ptr<BodyState> place(const Scene& scene, const SceneObject& object,
                                           const Vec3& point) const = 0;
  virtual void step(BodyState& state, double dt) const = 0;
  /// Instantaneous rotation by `angle` about `axis` through the center of mass.
  virtual void tilt(BodyState& state, const Vec3& axis, double angle) const = 0;

  virtual UnitQuat orientation(const BodyState& state) const = 0;
  virtual Pose pose(const BodyState& state) const = 0;
  virtual Vec3 center_of_mass(const BodyState& state) const = 0;
  virtual bool at_rest(const BodyState& state) const = 0;
  virtual bool penetrating(const BodyState& state) const = 0;
};

/// Knobs of the built-in quasi-static backend.
struct QuasiStaticParams {
  double contact_tolerance = 1e-5;      // m
  double penetration_tolerance = 1e-6;  // m
  double rest_margin = 1e-4;            // m, COM inside support polygon
  double return_time_constant = 10.0;   // steps
  double return_snap_angle = 1e-5;      // rad; damped return completes below this
};

/// Quasi-static backend: contact manifolds from convex features, support
/// polygon rest test, rigid tipping about the nearest support edge, free
/// fall, and damped return after small tilts. Infinite friction; no sliding.
std::shared_ptr<const PhysicsBackend> builtin_backend(const QuasiStaticParams& params = {});

}  // namespace placeplan
