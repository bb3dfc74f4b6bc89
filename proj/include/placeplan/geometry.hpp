#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>

namespace placeplan {

/// Meters, world frame, +z up.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

bool is_finite(const Vec3& v);

/// Unit quaternion kept in canonical form (w >= 0) so that the scalar
/// component is a comparable stability signal.
class UnitQuat {
 public:
  UnitQuat() : q_(Eigen::Quaterniond::Identity()) {}

  /// Throws ValidationError unless |q| = 1 within 1e-9 and all entries are finite.
  static UnitQuat from_wxyz(double w, double x, double y, double z);
  /// Normalizes its input; throws ValidationError for a zero or non-finite quaternion.
  static UnitQuat normalized(const Eigen::Quaterniond& q);
  static UnitQuat from_axis_angle(const Vec3& axis, double angle);
  static UnitQuat identity() { return UnitQuat(); }

  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }

  const Eigen::Quaterniond& eigen() const { return q_; }
  Mat3 matrix() const { return q_.toRotationMatrix(); }
  Vec3 rotate(const Vec3& v) const { return q_ * v; }
  UnitQuat inverse() const;

  /// Rotation angle in [0, pi].
  double angle() const;

  friend UnitQuat operator*(const UnitQuat& a, const UnitQuat& b);
  bool operator==(const UnitQuat& o) const;

 private:
  explicit UnitQuat(const Eigen::Quaterniond& q);
  Eigen::Quaterniond q_;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  UnitQuat orientation;

  Vec3 apply(const Vec3& local) const { return orientation.rotate(local) + position; }
  /// Composition: (this * child) maps child-local into this pose's parent frame.
  Pose operator*(const Pose& child) const;
  bool operator==(const Pose& o) const;
};

/// Axis-aligned box.
struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  static Aabb from_min_max(const Vec3& lo, const Vec3& hi) { return {lo, hi}; }

  bool empty() const { return (min.array() > max.array()).any(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 size() const { return max - min; }
  void extend(const Vec3& p);
  void extend(const Aabb& o);
  bool contains(const Vec3& p, double eps = 0.0) const;
  bool overlaps(const Aabb& o, double eps = 0.0) const;
  /// Euclidean distance from p to the box; zero inside.
  double distance(const Vec3& p) const;
  bool operator==(const Aabb& o) const { return min == o.min && max == o.max; }
};

}  // namespace placeplan
