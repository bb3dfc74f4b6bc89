#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "builders.hpp"
#include "placeplan/candidates.hpp"
#include "placeplan/errors.hpp"

using namespace placeplan;
using namespace placeplan::testing;

namespace {

struct OracleBox {
  Vec3 center;
  Vec3 half;
  double yaw;
};

// Vertical extents of yawed boxes hit by the line through (x, y), bottom-up.
std::vector<std::pair<double, double>> ray_drop(const std::vector<OracleBox>& boxes, double x, double y) {
  std::vector<std::pair<double, double>> spans;
  for (const auto& b : boxes) {
    const double dx = x - b.center.x();
    const double dy = y - b.center.y();
    const double lx = std::cos(b.yaw) * dx + std::sin(b.yaw) * dy;
    const double ly = -std::sin(b.yaw) * dx + std::cos(b.yaw) * dy;
    if (std::abs(lx) <= b.half.x() && std::abs(ly) <= b.half.y())
      spans.emplace_back(b.center.z() - b.half.z(), b.center.z() + b.half.z());
  }
  std::sort(spans.begin(), spans.end());
  return spans;
}

Scene stacked_scene(const std::vector<OracleBox>& boxes, const Vec3& placed_half, const Aabb& ws) {
  Scene s;
  int n = 0;
  for (const auto& b : boxes) {
    SceneObject o = box_object("o" + std::to_string(n++), b.half, b.center);
    o.pose.orientation = UnitQuat::from_axis_angle(Vec3::UnitZ(), b.yaw);
    s.objects.push_back(o);
  }
  s.placement_object = box_object("p", placed_half, Vec3::Zero(), false, 0.3);
  s.workspace = ws;
  return s;
}

const std::vector<OracleBox> kBoxes = {
    {Vec3(0, 0, -0.01), Vec3(1.0, 1.0, 0.01), 0.0},        // floor
    {Vec3(0.2, 0.1, 0.05), Vec3(0.1, 0.08, 0.05), 0.0},    // block
    {Vec3(-0.25, -0.2, 0.1), Vec3(0.12, 0.05, 0.1), 0.3},  // yawed block
    {Vec3(0.0, -0.3, 0.01), Vec3(0.15, 0.1, 0.01), 0.0},   // shelf bottom
    {Vec3(0.0, -0.3, 0.31), Vec3(0.15, 0.1, 0.01), 0.0},   // shelf board
};

}  // namespace

TEST_CASE("surface snap heights match a brute-force ray drop") {
  const Vec3 half(0.02, 0.02, 0.04);
  const Aabb ws = Aabb::from_min_max(Vec3(-0.45, -0.45, 0.0), Vec3(0.45, 0.45, 1.0));
  const Scene scene = stacked_scene(kBoxes, half, ws);
  const double res = 0.013;
  const CandidateGrid grid = generate_candidates(scene, res, ZMode::surface_snap);

  std::vector<Vec3> want;
  const int n = static_cast<int>(std::floor((0.9 + 1e-9) / res)) + 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = -0.45 + i * res, y = -0.45 + j * res;
      const auto spans = ray_drop(kBoxes, x, y);
      if (spans.empty()) continue;
      double top = -std::numeric_limits<double>::infinity();
      for (const auto& s : spans) top = std::max(top, s.second);
      want.emplace_back(x, y, top + half.z());
    }
  }
  REQUIRE(grid.points.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) {
    CAPTURE(k);
    CHECK((grid.points[k] - want[k]).norm() < 1e-9);
  }
  CHECK(grid.resolution == res);
}

TEST_CASE("surface levels emit every surface with room for the object") {
  const Vec3 half(0.02, 0.02, 0.08);
  const Aabb ws = Aabb::from_min_max(Vec3(-0.45, -0.45, 0.0), Vec3(0.45, 0.45, 1.0));
  const Scene scene = stacked_scene(kBoxes, half, ws);
  const double res = 0.017;
  const CandidateGrid grid = generate_candidates(scene, res, ZMode::surface_levels);

  std::vector<Vec3> want;
  const int n = static_cast<int>(std::floor((0.9 + 1e-9) / res)) + 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = -0.45 + i * res, y = -0.45 + j * res;
      const auto spans = ray_drop(kBoxes, x, y);
      for (std::size_t k = 0; k < spans.size(); ++k) {
        const double ceiling =
            k + 1 < spans.size() ? spans[k + 1].first : std::numeric_limits<double>::infinity();
        if (ceiling - spans[k].second >= 2 * half.z()) want.emplace_back(x, y, spans[k].second + half.z());
      }
    }
  }
  REQUIRE(grid.points.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) CHECK((grid.points[k] - want[k]).norm() < 1e-9);

  // The shelf interior yields two levels per column.
  const auto inside = std::count_if(grid.points.begin(), grid.points.end(), [](const Vec3& p) {
    return std::abs(p.x()) < 0.1 && std::abs(p.y() + 0.3) < 0.05;
  });
  const auto upper = std::count_if(grid.points.begin(), grid.points.end(), [](const Vec3& p) {
    return std::abs(p.x()) < 0.1 && std::abs(p.y() + 0.3) < 0.05 && p.z() > 0.3;
  });
  CHECK(inside == 2 * upper);
}

TEST_CASE("points outside the workspace height are dropped") {
  const Vec3 half(0.02, 0.02, 0.04);
  const Aabb ws = Aabb::from_min_max(Vec3(-0.45, -0.45, 0.0), Vec3(0.45, 0.45, 0.1));
  const Scene scene = stacked_scene(kBoxes, half, ws);
  const CandidateGrid grid = generate_candidates(scene, 0.05, ZMode::surface_snap);
  for (const auto& p : grid.points) CHECK(p.z() <= 0.1 + 1e-12);
  CHECK(!grid.points.empty());
}

TEST_CASE("full lattice covers the workspace and is lexicographically ordered") {
  Scene s = load_fixture("flat_table.json").scene;
  const CandidateGrid grid = generate_candidates(s, 0.05, ZMode::full_lattice);
  CHECK(grid.points.size() == 13u * 9u * 3u);
  CHECK(std::is_sorted(grid.points.begin(), grid.points.end(), [](const Vec3& a, const Vec3& b) {
    return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
  }));
  for (const auto& p : grid.points) CHECK(s.workspace.contains(p, 1e-12));
}

TEST_CASE("candidate generation enforces its preconditions") {
  const Scene s = load_fixture("flat_table.json").scene;
  CHECK_THROWS_AS(generate_candidates(s, 0.0, ZMode::surface_snap), ContractViolation);
  CHECK_THROWS_AS(generate_candidates(s, 0.001, ZMode::full_lattice, 1000), CapExceeded);
  CHECK_THROWS_AS(z_mode_from_string("sideways"), ValidationError);
  CHECK(z_mode_from_string(to_string(ZMode::surface_levels)) == ZMode::surface_levels);
}

TEST_CASE("column_surfaces reports ceilings") {
  const Vec3 half(0.02, 0.02, 0.04);
  const Aabb ws = Aabb::from_min_max(Vec3(-0.45, -0.45, 0.0), Vec3(0.45, 0.45, 1.0));
  const Scene scene = stacked_scene(kBoxes, half, ws);
  const auto hits = column_surfaces(scene, 0.01, -0.3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].top == doctest::Approx(0.32));
  CHECK(std::isinf(hits[0].ceiling));
  CHECK(hits[1].top == doctest::Approx(0.02));
  CHECK(hits[1].ceiling == doctest::Approx(0.30));
  // The floor under the shelf is capped flush by the bottom board.
  CHECK(hits[2].top == doctest::Approx(0.0));
  CHECK(hits[2].ceiling == doctest::Approx(0.0));
}
