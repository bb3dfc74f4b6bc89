#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "builders.hpp"

namespace placeplan::testing {

/// Axis-aligned box of half extents `half` resting with its COM at (x, y) on
/// a table top spanning [-tx, tx] x [-ty, ty]. Closed-form classification
/// under the perturbation schedule: the support is the footprint clipped to
/// the table top; the body returns from a tilt by `angle` about a horizontal
/// axis through the COM iff every side distance d of the support satisfies
/// d cos(angle) - h sin(angle) > 0, with h the COM height above the support.
struct BoxOnPlane {
  double tx = 0.3, ty = 0.2, top = 0.4;
  Vec3 half{0.04, 0.03, 0.05};
  double angle = 0.05;
  double rest_margin = 1e-4;

  /// Smallest side distance of the support around the COM; negative when the
  /// COM is outside or there is no support.
  double margin(double x, double y) const {
    const double x0 = std::max(x - half.x(), -tx), x1 = std::min(x + half.x(), tx);
    const double y0 = std::max(y - half.y(), -ty), y1 = std::min(y + half.y(), ty);
    if (x0 >= x1 || y0 >= y1) return -1.0;
    return std::min({x - x0, x1 - x, y - y0, y1 - y});
  }

  double tilted_margin(double x, double y) const {
    return margin(x, y) * std::cos(angle) - half.z() * std::sin(angle);
  }

  bool stable(double x, double y) const {
    return margin(x, y) >= rest_margin && tilted_margin(x, y) > 0.0;
  }

  Scene scene() const {
    const Aabb ws = Aabb::from_min_max(Vec3(-tx - 0.1, -ty - 0.1, top), Vec3(tx + 0.1, ty + 0.1, top + 0.1));
    return box_on_table(tx, ty, top, half, ws);
  }

  /// n x n lattice over the table plus a border where the box falls off.
  std::vector<Vec3> lattice(int n) const {
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = -tx - 0.07 + (2 * tx + 0.14) * i / (n - 1);
        const double y = -ty - 0.07 + (2 * ty + 0.14) * j / (n - 1);
        pts.emplace_back(x, y, top + half.z());
      }
    }
    return pts;
  }
};

}  // namespace placeplan::testing
