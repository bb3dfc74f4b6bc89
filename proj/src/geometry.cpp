#include "placeplan/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "placeplan/errors.hpp"

namespace placeplan {

bool is_finite(const Vec3& v) { return v.allFinite(); }

UnitQuat::UnitQuat(const Eigen::Quaterniond& q) : q_(q) {
  if (q_.w() < 0.0) q_.coeffs() = -q_.coeffs();
}

UnitQuat UnitQuat::from_wxyz(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  if (!q.coeffs().allFinite()) throw ValidationError("quaternion has non-finite components");
  if (std::abs(q.squaredNorm() - 1.0) > 1e-9) {
    throw ValidationError("quaternion is not unit length (|q|^2 = " +
                          std::to_string(q.squaredNorm()) + ")");
  }
  return UnitQuat(q);
}

UnitQuat UnitQuat::normalized(const Eigen::Quaterniond& q) {
  const double n = q.norm();
  if (!std::isfinite(n) || n < 1e-12) throw ValidationError("cannot normalize quaternion");
  if (std::abs(q.squaredNorm() - 1.0) <= 1e-12) return UnitQuat(q);
  return UnitQuat(Eigen::Quaterniond(q.coeffs() / n));
}

UnitQuat UnitQuat::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw ValidationError("rotation axis must be nonzero");
  return normalized(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis / n)));
}

UnitQuat UnitQuat::inverse() const { return UnitQuat(q_.conjugate()); }

double UnitQuat::angle() const { return 2.0 * std::acos(std::clamp(q_.w(), -1.0, 1.0)); }

UnitQuat operator*(const UnitQuat& a, const UnitQuat& b) {
  Eigen::Quaterniond p = a.q_ * b.q_;
  // Products drift off the unit sphere; renormalize only when the drift is measurable.
  if (std::abs(p.squaredNorm() - 1.0) > 1e-14) p.normalize();
  return UnitQuat(p);
}

bool UnitQuat::operator==(const UnitQuat& o) const { return q_.coeffs() == o.q_.coeffs(); }

Pose Pose::operator*(const Pose& child) const {
  return Pose{apply(child.position), orientation * child.orientation};
}

bool Pose::operator==(const Pose& o) const {
  return position == o.position && orientation == o.orientation;
}

void Aabb::extend(const Vec3& p) {
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

void Aabb::extend(const Aabb& o) {
  if (o.empty()) return;
  min = min.cwiseMin(o.min);
  max = max.cwiseMax(o.max);
}

bool Aabb::contains(const Vec3& p, double eps) const {
  return (p.array() >= min.array() - eps).all() && (p.array() <= max.array() + eps).all();
}

bool Aabb::overlaps(const Aabb& o, double eps) const {
  return (min.array() <= o.max.array() + eps).all() && (o.min.array() <= max.array() + eps).all();
}

double Aabb::distance(const Vec3& p) const {
  const Vec3 below = (min - p).cwiseMax(0.0);
  const Vec3 above = (p - max).cwiseMax(0.0);
  return (below + above).norm();
}

}  // namespace placeplan
