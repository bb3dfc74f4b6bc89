#pragma once

#include <cstddef>
#include <string>

#include "placeplan/scene.hpp"

namespace placeplan {

/// How lattice columns are turned into candidate points.
///  - surface_snap: one point per (x, y) column, resting on the highest
///    upward-facing static surface in that column.
///  - surface_levels: one point per upward-facing static surface in the
///    column that leaves vertical room for the placement object (shelves).
///  - full_lattice: every lattice point in the workspace.
enum class ZMode { surface_snap, surface_levels, full_lattice };

std::string to_string(ZMode mode);
ZMode z_mode_from_string(const std::string& s);

inline constexpr std::size_t kDefaultPointCap = 1'000'000;

CandidateGrid generate_candidates(const Scene& scene, double resolution, ZMode mode,
                                  std::size_t point_cap = kDefaultPointCap);

/// Heights of upward-facing static surfaces hit by a vertical ray through
/// (x, y), highest first. Each entry is (surface z, z of the next static
/// surface above it or +inf).
struct SurfaceHit {
  double top = 0.0;
  double ceiling = 0.0;
};
std::vector<SurfaceHit> column_surfaces(const Scene& scene, double x, double y);

}  // namespace placeplan
