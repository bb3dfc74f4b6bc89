#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "convex.hpp"
#include "hull2d.hpp"
#include "placeplan/errors.hpp"
#include "placeplan/physics.hpp"

namespace placeplan {

namespace {

using detail::ConvexPolyhedron;

// Largest displacement of any body point within one collision-checked
// sub-motion. Keeps thin rails from being tunneled through.
constexpr double kMaxSubstepTravel = 0.002;
// Faces within 45 degrees of horizontal count as bearing surfaces.
constexpr double kBearingCos = 0.70710678118654752;
constexpr int kBisectIterations = 40;
constexpr double kNoProgress = 1e-12;

struct World {
  std::vector<ConvexPolyhedron> colliders;
  Aabb workspace;
  double gravity = 9.81;
};

struct BodyModel {
  std::vector<ConvexPolyhedron> local;  // object frame
  Vec3 local_com = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();  // about the COM, object frame
  double mass = 1.0;
  double radius = 0.0;  // max distance of a vertex from the object origin
};

enum class Mode { settling, resting, tipping, falling, returning, tilt_tip, fallen, stuck };

struct QsState final : BodyState {
  std::shared_ptr<const World> world;
  std::shared_ptr<const BodyModel> body;
  Pose pose;
  Mode mode = Mode::settling;

  Vec3 pivot = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
  double omega = 0.0;
  double speed = 0.0;
  bool tip_blocked = false;

  // Pose the body returns to or tips from after a tilt.
  Pose anchor;
  double residual = 0.0;
  bool anchor_at_rest = false;

  std::unique_ptr<BodyState> clone() const override { return std::make_unique<QsState>(*this); }
};

Mat3 shape_inertia(const ShapePrimitive& s, double m) {
  Mat3 I = Mat3::Zero();
  if (const auto* b = std::get_if<BoxDims>(&s.dims)) {
    const Vec3 h2 = b->half_extents.cwiseProduct(b->half_extents);
    I.diagonal() << m / 3.0 * (h2.y() + h2.z()), m / 3.0 * (h2.x() + h2.z()),
        m / 3.0 * (h2.x() + h2.y());
  } else if (const auto* c = std::get_if<CylinderDims>(&s.dims)) {
    const double r2 = c->radius * c->radius;
    const double side = m * (r2 / 4.0 + c->half_height * c->half_height / 3.0);
    I.diagonal() << side, side, m * r2 / 2.0;
  } else {
    throw UnsupportedGeometry("sphere shapes are not supported by the quasi-static backend");
  }
  const Mat3 R = s.offset.orientation.matrix();
  return R * I * R.transpose();
}

std::shared_ptr<const BodyModel> make_body(const SceneObject& obj) {
  auto body = std::make_shared<BodyModel>();
  body->mass = obj.mass;
  body->local_com = obj.local_com();
  double total_volume = 0.0;
  for (const auto& s : obj.shapes) total_volume += s.volume();
  for (const auto& s : obj.shapes) {
    body->local.push_back(detail::make_polyhedron(s, Pose{}));
    const double m = obj.mass * s.volume() / total_volume;
    const Vec3 d = s.offset.position - body->local_com;
    body->inertia += shape_inertia(s, m) + m * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
    for (const auto& v : body->local.back().vertices) body->radius = std::max(body->radius, v.norm());
  }
  return body;
}

std::shared_ptr<const World> make_world(const Scene& scene) {
  auto world = std::make_shared<World>();
  world->workspace = scene.workspace;
  world->gravity = scene.gravity;
  for (const auto& obj : scene.objects) {
    for (const auto& s : obj.shapes) world->colliders.push_back(detail::make_polyhedron(s, obj.pose));
  }
  return world;
}

Pose rotate_about(const Pose& p, const Vec3& center, const Vec3& axis, double angle) {
  const UnitQuat q = UnitQuat::from_axis_angle(axis, angle);
  return Pose{center + q.rotate(p.position - center), q * p.orientation};
}

class QuasiStaticBackend final : public PhysicsBackend {
 public:
  explicit QuasiStaticBackend(const QuasiStaticParams& params) : params_(params) {}

  std::string name() const override { return "quasi_static"; }

  std::unique_ptr<BodyState> place(const Scene& scene, const SceneObject& object,
                                   const Vec3& point) const override {
    auto s = std::make_unique<QsState>();
    s->world = make_world(scene);
    s->body = make_body(object);
    s->pose = Pose{point, object.pose.orientation};
    return s;
  }

  void step(BodyState& base, double dt) const override {
    auto& s = cast(base);
    switch (s.mode) {
      case Mode::resting:
      case Mode::fallen:
      case Mode::stuck:
        return;
      case Mode::returning:
        step_return(s);
        return;
      case Mode::tilt_tip:
        step_tilt_tip(s);
        return;
      case Mode::settling:
        settle(s);
        if (s.mode == Mode::tipping) step_tipping(s, dt);
        if (s.mode == Mode::falling) step_falling(s, dt);
        return;
      case Mode::tipping:
        step_tipping(s, dt);
        return;
      case Mode::falling:
        step_falling(s, dt);
        return;
    }
  }

  void tilt(BodyState& base, const Vec3& axis, double angle) const override {
    auto& s = cast(base);
    const Pose pre = s.pose;
    const Vec3 c = com(s, pre);
    const Pose tilted = rotate_about(pre, c, axis, angle);
    if (s.mode == Mode::fallen) {
      s.pose = tilted;
      return;
    }
    const auto cts = bearing_contacts(s, pre);
    if (cts.empty()) {
      s.pose = tilted;
      if (s.mode != Mode::falling) s.mode = Mode::settling;
      return;
    }
    // Support after the tilt: the pre-tilt bearing contacts carried along
    // with the body. Side contacts are left to the simulated tip.
    const UnitQuat q = UnitQuat::from_axis_angle(axis, angle);
    std::vector<detail::Vec2> proj;
    proj.reserve(cts.size());
    for (const auto& p : cts) {
      const Vec3 r = c + q.rotate(p - c);
      proj.emplace_back(r.x(), r.y());
    }
    const auto hull = detail::convex_hull(proj);
    const auto m = detail::support_margin(hull, {c.x(), c.y()});
    s.anchor = pre;
    s.axis = axis.normalized();
    s.residual = angle;
    s.omega = 0.0;
    s.speed = 0.0;
    s.tip_blocked = false;
    s.pose = tilted;
    if (m.margin > 0.0) {
      s.anchor_at_rest = s.mode == Mode::resting;
      s.mode = Mode::returning;
    } else {
      s.pivot = cts[hull.index[m.edge_from]];
      s.mode = Mode::tilt_tip;
    }
  }

  UnitQuat orientation(const BodyState& s) const override { return cast(s).pose.orientation; }
  Pose pose(const BodyState& s) const override { return cast(s).pose; }
  Vec3 center_of_mass(const BodyState& s) const override {
    const auto& st = cast(s);
    return com(st, st.pose);
  }
  bool at_rest(const BodyState& s) const override { return cast(s).mode == Mode::resting; }
  bool penetrating(const BodyState& s) const override {
    const auto& st = cast(s);
    return penetrates(st, st.pose);
  }

 private:
  static QsState& cast(BodyState& s) { return static_cast<QsState&>(s); }
  static const QsState& cast(const BodyState& s) { return static_cast<const QsState&>(s); }

  static Vec3 com(const QsState& s, const Pose& p) { return p.apply(s.body->local_com); }

  static std::vector<ConvexPolyhedron> world_polys(const QsState& s, const Pose& p) {
    std::vector<ConvexPolyhedron> out = s.body->local;
    for (auto& poly : out) poly.transform(p);
    return out;
  }

  bool penetrates(const QsState& s, const Pose& p) const {
    const auto polys = world_polys(s, p);
    for (const auto& a : polys) {
      for (const auto& b : s.world->colliders) {
        if (!a.bounds.overlaps(b.bounds)) continue;
        if (detail::penetration_depth(a, b) > params_.penetration_tolerance) return true;
      }
    }
    return false;
  }

  std::vector<Vec3> contacts(const QsState& s, const Pose& p) const {
    std::vector<Vec3> out;
    const auto polys = world_polys(s, p);
    for (const auto& a : polys) {
      for (const auto& b : s.world->colliders) {
        detail::contact_points(a, b, params_.contact_tolerance, out);
      }
    }
    return out;
  }

  // Contacts between a downward-facing body face and an upward-facing
  // collider face.
  std::vector<Vec3> bearing_contacts(const QsState& s, const Pose& p) const {
    const double tol = params_.contact_tolerance;
    const auto on_face = [tol](const ConvexPolyhedron& poly, const Vec3& v, double sign) {
      for (const auto& f : poly.faces) {
        if (sign * f.normal.z() >= kBearingCos && std::abs(f.normal.dot(v) - f.offset) <= tol) return true;
      }
      return false;
    };
    std::vector<Vec3> out;
    std::vector<Vec3> pair;
    for (const auto& a : world_polys(s, p)) {
      for (const auto& b : s.world->colliders) {
        pair.clear();
        detail::contact_points(a, b, tol, pair);
        for (const auto& v : pair) {
          if (on_face(a, v, -1.0) && on_face(b, v, 1.0)) out.push_back(v);
        }
      }
    }
    return out;
  }

  bool below_workspace(const QsState& s, const Pose& p) const {
    return com(s, p).z() < s.world->workspace.min.z();
  }

  // Follows pose_at(t) for t in [0, 1] until the first penetration. Returns
  // the fraction travelled; `out` receives the last admissible pose.
  template <class PoseAt>
  double advance(const QsState& s, double travel, PoseAt&& pose_at, Pose& out) const {
    const int n = std::max(1, static_cast<int>(std::ceil(travel / kMaxSubstepTravel)));
    double done = 0.0;
    out = pose_at(0.0);
    for (int i = 1; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      const Pose next = pose_at(t);
      if (!penetrates(s, next)) {
        out = next;
        done = t;
        continue;
      }
      double lo = done;
      double hi = t;
      for (int k = 0; k < kBisectIterations; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (penetrates(s, pose_at(mid))) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      if (lo > done) out = pose_at(lo);
      return lo;
    }
    return 1.0;
  }

  void settle(QsState& s) const {
    const auto cts = contacts(s, s.pose);
    if (cts.empty()) {
      s.mode = Mode::falling;
      s.speed = 0.0;
      return;
    }
    std::vector<detail::Vec2> proj;
    proj.reserve(cts.size());
    for (const auto& p : cts) proj.emplace_back(p.x(), p.y());
    const auto hull = detail::convex_hull(proj);
    const Vec3 c = com(s, s.pose);
    const auto m = detail::support_margin(hull, {c.x(), c.y()});
    if (m.margin >= params_.rest_margin) {
      s.mode = Mode::resting;
      s.tip_blocked = false;
      return;
    }
    const Vec3 a = cts[hull.index[m.edge_from]];
    const Vec3 b = cts[hull.index[m.edge_to]];
    Vec3 axis = b - a;
    if (axis.norm() < 1e-9 || std::abs(axis.normalized().z()) > 0.9) {
      const Vec3 d(c.x() - a.x(), c.y() - a.y(), 0.0);
      axis = Vec3::UnitZ().cross(d);
      if (axis.norm() < 1e-12) axis = Vec3::UnitX();
    }
    s.pivot = a;
    s.axis = axis.normalized();
    s.omega = 0.0;
    s.mode = Mode::tipping;
  }

  void step_tipping(QsState& s, double dt) const {
    const auto& body = *s.body;
    const Vec3 c = com(s, s.pose);
    const Vec3 r = c - s.pivot;
    const Vec3 weight(0.0, 0.0, -body.mass * s.world->gravity);
    const double torque = r.cross(weight).dot(s.axis);
    const Mat3 R = s.pose.orientation.matrix();
    const Vec3 perp = r - r.dot(s.axis) * s.axis;
    const double inertia =
        s.axis.dot(R * body.inertia * R.transpose() * s.axis) + body.mass * perp.squaredNorm();
    s.omega += torque / inertia * dt;
    const double dtheta = s.omega * dt;
    if (dtheta == 0.0) return;

    const Pose start = s.pose;
    const double reach = (start.position - s.pivot).norm() + body.radius;
    Pose next;
    const double frac = advance(s, std::abs(dtheta) * reach, [&](double t) {
      return rotate_about(start, s.pivot, s.axis, dtheta * t);
    }, next);
    s.pose = next;
    if (below_workspace(s, s.pose)) {
      s.mode = Mode::fallen;
      return;
    }
    if (frac >= 1.0) {
      s.tip_blocked = false;
      return;
    }
    s.omega = 0.0;
    if (frac * std::abs(dtheta) < kNoProgress) {
      // Rotation is blocked outright: let gravity try to slide the body down.
      s.tip_blocked = true;
      s.mode = Mode::falling;
      s.speed = 0.0;
    } else {
      s.tip_blocked = false;
      s.mode = Mode::settling;
    }
  }

  void step_falling(QsState& s, double dt) const {
    s.speed += s.world->gravity * dt;
    const double dz = s.speed * dt;
    const Pose start = s.pose;
    Pose next;
    const double frac = advance(s, dz, [&](double t) {
      Pose p = start;
      p.position.z() -= dz * t;
      return p;
    }, next);
    s.pose = next;
    if (below_workspace(s, s.pose)) {
      s.mode = Mode::fallen;
      return;
    }
    if (frac >= 1.0) {
      s.tip_blocked = false;
      return;
    }
    s.speed = 0.0;
    if (frac * dz < kNoProgress && s.tip_blocked) {
      s.mode = Mode::stuck;
      return;
    }
    s.mode = Mode::settling;
  }

  void step_return(QsState& s) const {
    s.residual *= std::exp(-1.0 / params_.return_time_constant);
    if (std::abs(s.residual) < params_.return_snap_angle) {
      s.pose = s.anchor;
      s.mode = s.anchor_at_rest ? Mode::resting : Mode::settling;
      return;
    }
    s.pose = rotate_about(s.anchor, com(s, s.anchor), s.axis, s.residual);
  }

  void step_tilt_tip(QsState& s) const {
    const Pose start = s.anchor;
    const double angle = s.residual;
    const double reach = (start.position - s.pivot).norm() + s.body->radius;
    Pose next;
    const double frac = advance(s, std::abs(angle) * reach, [&](double t) {
      return rotate_about(start, s.pivot, s.axis, angle * t);
    }, next);
    s.pose = next;
    s.omega = 0.0;
    s.tip_blocked = false;
    if (below_workspace(s, s.pose)) {
      s.mode = Mode::fallen;
    } else {
      s.mode = frac >= 1.0 ? Mode::tipping : Mode::settling;
    }
  }

  QuasiStaticParams params_;
};

}  // namespace

std::shared_ptr<const PhysicsBackend> builtin_backend(const QuasiStaticParams& params) {
  if (!(params.contact_tolerance > 0.0) || !(params.penetration_tolerance > 0.0) ||
      !(params.rest_margin >= 0.0) || !(params.return_time_constant > 0.0) ||
      !(params.return_snap_angle > 0.0)) {
    throw ValidationError("quasi-static backend parameters must be positive");
  }
  return std::make_shared<QuasiStaticBackend>(params);
}

}  // namespace placeplan
