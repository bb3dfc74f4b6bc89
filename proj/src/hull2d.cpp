#include "hull2d.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace placeplan::detail {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

Hull2 convex_hull(std::span<const Vec2> pts) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  // Merge near-duplicates so that noise does not create sliver edges.
  std::vector<int> uniq;
  for (int i : order) {
    if (!uniq.empty() && (pts[uniq.back()] - pts[i]).norm() < 1e-12) continue;
    uniq.push_back(i);
  }
  Hull2 hull;
  if (uniq.size() <= 2) {
    for (int i : uniq) {
      hull.points.push_back(pts[i]);
      hull.index.push_back(i);
    }
    return hull;
  }
  std::vector<int> h(2 * uniq.size());
  std::size_t k = 0;
  constexpr double eps = 1e-15;
  for (int i : uniq) {
    while (k >= 2 && cross(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  const std::size_t lower = k + 1;
  for (auto it = uniq.rbegin() + 1; it != uniq.rend(); ++it) {
    while (k >= lower && cross(pts[h[k - 2]], pts[h[k - 1]], pts[*it]) <= eps) --k;
    h[k++] = *it;
  }
  h.resize(k - 1);
  for (int i : h) {
    hull.points.push_back(pts[i]);
    hull.index.push_back(i);
  }
  return hull;
}

MarginQuery support_margin(const Hull2& hull, const Vec2& p) {
  const auto& v = hull.points;
  const int n = static_cast<int>(v.size());
  MarginQuery q;
  if (n == 1) {
    q.margin = -(p - v[0]).norm();
    return q;
  }
  if (n == 2) {
    q.margin = -segment_distance(p, v[0], v[1]);
    q.edge_to = 1;
    return q;
  }
  bool inside = true;
  double nearest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const Vec2 e = v[j] - v[i];
    const double signed_dist = cross(v[i], v[j], p) / e.norm();
    if (signed_dist <= 0.0) inside = false;
    const double d = segment_distance(p, v[i], v[j]);
    if (d < nearest) {
      nearest = d;
      q.edge_from = i;
      q.edge_to = j;
    }
  }
  q.margin = inside ? nearest : -nearest;
  return q;
}

}  // namespace placeplan::detail
