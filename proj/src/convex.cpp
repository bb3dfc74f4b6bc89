#include "convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "placeplan/errors.hpp"

namespace placeplan::detail {

namespace {

void add_unique_axis(std::vector<Vec3>& axes, const Vec3& dir) {
  const double n = dir.norm();
  if (n < 1e-12) return;
  const Vec3 u = dir / n;
  for (const auto& a : axes) {
    if (std::abs(std::abs(a.dot(u)) - 1.0) < 1e-12) return;
  }
  axes.push_back(u);
}

ConvexPolyhedron make_box(const Vec3& h) {
  ConvexPolyhedron p;
  for (int i = 0; i < 8; ++i) {
    p.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 n = Vec3::Zero();
    n[axis] = 1.0;
    p.faces.push_back({n, h[axis]});
    p.faces.push_back({-n, h[axis]});
    p.face_axes.push_back(n);
    p.edge_axes.push_back(n);
    const int bit = 1 << axis;
    for (int i = 0; i < 8; ++i) {
      if (!(i & bit)) p.edges.emplace_back(i, i | bit);
    }
  }
  return p;
}

ConvexPolyhedron make_prism(double r, double hh) {
  ConvexPolyhedron p;
  const int n = kCylinderSides;
  const double step = 2.0 * std::numbers::pi / n;
  // Vertices sit between face normals so that a face normal points along -y.
  const double phase = -0.5 * std::numbers::pi + 0.5 * step;
  for (int k = 0; k < n; ++k) {
    const double a = phase + k * step;
    p.vertices.emplace_back(r * std::cos(a), r * std::sin(a), -hh);
  }
  for (int k = 0; k < n; ++k) {
    const double a = phase + k * step;
    p.vertices.emplace_back(r * std::cos(a), r * std::sin(a), hh);
  }
  p.faces.push_back({Vec3::UnitZ(), hh});
  p.faces.push_back({-Vec3::UnitZ(), hh});
  add_unique_axis(p.face_axes, Vec3::UnitZ());
  add_unique_axis(p.edge_axes, Vec3::UnitZ());
  const double apothem = r * std::cos(0.5 * step);
  for (int k = 0; k < n; ++k) {
    const double a = phase + (k + 0.5) * step;
    const Vec3 normal(std::cos(a), std::sin(a), 0.0);
    p.faces.push_back({normal, apothem});
    add_unique_axis(p.face_axes, normal);
    const int next = (k + 1) % n;
    p.edges.emplace_back(k, next);
    p.edges.emplace_back(n + k, n + next);
    p.edges.emplace_back(k, n + k);
    add_unique_axis(p.edge_axes, p.vertices[next] - p.vertices[k]);
  }
  return p;
}

void project(const ConvexPolyhedron& p, const Vec3& axis, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto& v : p.vertices) {
    const double d = axis.dot(v);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
}

// Overlap of the two projections on `axis`; negative means a gap.
double overlap(const ConvexPolyhedron& a, const ConvexPolyhedron& b, const Vec3& axis) {
  double alo, ahi, blo, bhi;
  project(a, axis, alo, ahi);
  project(b, axis, blo, bhi);
  return std::min(ahi - blo, bhi - alo);
}

// Closest points between segments p0p1 and q0q1.
double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1,
                        Vec3& mid) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  const double c = d1.dot(r);
  const double b = d1.dot(d2);
  const double denom = a * e - b * b;
  if (denom > 1e-18 * a * e) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
  t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  const Vec3 cp = p0 + s * d1;
  const Vec3 cq = q0 + t * d2;
  mid = 0.5 * (cp + cq);
  return (cp - cq).norm();
}

}  // namespace

double ConvexPolyhedron::plane_distance(const Vec3& p) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& f : faces) worst = std::max(worst, f.normal.dot(p) - f.offset);
  return worst;
}

void ConvexPolyhedron::transform(const Pose& pose) {
  const Mat3 R = pose.orientation.matrix();
  bounds = Aabb{};
  for (auto& v : vertices) {
    v = R * v + pose.position;
    bounds.extend(v);
  }
  for (auto& f : faces) {
    f.normal = R * f.normal;
    f.offset += f.normal.dot(pose.position);
  }
  for (auto& a : face_axes) a = R * a;
  for (auto& a : edge_axes) a = R * a;
}

ConvexPolyhedron make_polyhedron(const ShapePrimitive& shape, const Pose& object_pose) {
  ConvexPolyhedron p;
  switch (shape.kind()) {
    case ShapeKind::box:
      p = make_box(std::get<BoxDims>(shape.dims).half_extents);
      break;
    case ShapeKind::cylinder: {
      const auto& c = std::get<CylinderDims>(shape.dims);
      p = make_prism(c.radius, c.half_height);
      break;
    }
    case ShapeKind::sphere:
      throw UnsupportedGeometry("sphere shapes are not supported by the quasi-static backend");
  }
  p.transform(object_pose * shape.offset);
  return p;
}

double penetration_depth(const ConvexPolyhedron& a, const ConvexPolyhedron& b) {
  double depth = std::numeric_limits<double>::infinity();
  auto test = [&](const Vec3& axis) {
    const double o = overlap(a, b, axis);
    depth = std::min(depth, o);
    return o > 0.0;
  };
  for (const auto& ax : a.face_axes) {
    if (!test(ax)) return depth;
  }
  for (const auto& ax : b.face_axes) {
    if (!test(ax)) return depth;
  }
  for (const auto& ea : a.edge_axes) {
    for (const auto& eb : b.edge_axes) {
      const Vec3 c = ea.cross(eb);
      const double n = c.norm();
      if (n < 1e-9) continue;
      if (!test(c / n)) return depth;
    }
  }
  return depth;
}

void contact_points(const ConvexPolyhedron& a, const ConvexPolyhedron& b, double tolerance,
                    std::vector<Vec3>& out) {
  if (!a.bounds.overlaps(b.bounds, tolerance)) return;
  for (const auto& v : a.vertices) {
    if (b.plane_distance(v) <= tolerance) out.push_back(v);
  }
  for (const auto& v : b.vertices) {
    if (a.plane_distance(v) <= tolerance) out.push_back(v);
  }
  Aabb region = a.bounds;
  region.min = region.min.cwiseMax(b.bounds.min);
  region.max = region.max.cwiseMin(b.bounds.max);
  for (const auto& [ai, aj] : a.edges) {
    const Vec3& p0 = a.vertices[ai];
    const Vec3& p1 = a.vertices[aj];
    Aabb ea;
    ea.extend(p0);
    ea.extend(p1);
    if (!ea.overlaps(region, tolerance)) continue;
    for (const auto& [bi, bj] : b.edges) {
      const Vec3& q0 = b.vertices[bi];
      const Vec3& q1 = b.vertices[bj];
      Aabb eb;
      eb.extend(q0);
      eb.extend(q1);
      if (!ea.overlaps(eb, tolerance)) continue;
      Vec3 mid;
      if (segment_distance(p0, p1, q0, q1, mid) <= tolerance) out.push_back(mid);
    }
  }
}

std::optional<std::pair<double, double>> vertical_span(const ConvexPolyhedron& p, double x,
                                                       double y) {
  if (x < p.bounds.min.x() || x > p.bounds.max.x() || y < p.bounds.min.y() ||
      y > p.bounds.max.y())
    return std::nullopt;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& f : p.faces) {
    const double rest = f.offset - f.normal.x() * x - f.normal.y() * y;
    const double nz = f.normal.z();
    if (nz > 1e-12) {
      hi = std::min(hi, rest / nz);
    } else if (nz < -1e-12) {
      lo = std::max(lo, rest / nz);
    } else if (rest < -1e-12) {
      return std::nullopt;
    }
  }
  if (!(lo <= hi)) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace placeplan::detail
