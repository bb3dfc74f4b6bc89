#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace placeplan::detail {

using Vec2 = Eigen::Vector2d;

/// Convex hull, counter-clockwise, collinear points dropped. `index` maps
/// each hull vertex back to the input array.
struct Hull2 {
  std::vector<Vec2> points;
  std::vector<int> index;
};

Hull2 convex_hull(std::span<const Vec2> pts);

struct MarginQuery {
  /// Positive: distance from the point to the hull boundary with the point
  /// strictly inside a proper polygon. Otherwise minus the distance to the hull
  /// (zero on the boundary; degenerate hulls never report a positive margin).
  double margin = 0.0;
  /// Hull vertex indices (into Hull2::points) of the nearest edge; equal for
  /// a single-point hull.
  int edge_from = 0;
  int edge_to = 0;
};

/// Requires a non-empty hull.
MarginQuery support_margin(const Hull2& hull, const Vec2& p);

}  // namespace placeplan::detail
