#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "placeplan/reasoning.hpp"
#include "placeplan/stability.hpp"

namespace placeplan {

enum class Kernel { gaussian_rbf };

struct KdeConfig {
  double bandwidth = 0.05;  // h, m
  Kernel kernel = Kernel::gaussian_rbf;
  void validate() const;
  bool operator==(const KdeConfig&) const = default;
};

struct BlendConfig {
  double beta = 0.1;
  void validate() const;
  bool operator==(const BlendConfig&) const = default;
};

struct WeightedPoints {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

/// Regular lattice; cell (ix, iy, iz) sits at origin + (ix, iy, iz) * spacing.
struct GridSpec {
  std::array<std::uint64_t, 3> dims{0, 0, 0};
  Vec3 spacing = Vec3::Zero();
  Vec3 origin = Vec3::Zero();

  /// Covers `box` at `spacing`, coarsening uniformly until at most
  /// `max_cells` cells remain.
  static GridSpec covering(const Aabb& box, double spacing, std::uint64_t max_cells = 262144);

  std::uint64_t size() const { return dims[0] * dims[1] * dims[2]; }
  /// Row-major linear index (ix * ny + iy) * nz + iz.
  std::uint64_t index(std::uint64_t ix, std::uint64_t iy, std::uint64_t iz) const {
    return (ix * dims[1] + iy) * dims[2] + iz;
  }
  Vec3 point(std::uint64_t linear) const;
  void validate() const;
};

struct DensityGrid {
  GridSpec spec;
  std::vector<double> values;  // row-major, see GridSpec::index

  /// Lowest linear index among the maximal values.
  std::uint64_t argmax() const;
};

struct DensityField {
  WeightedPoints support;
  KdeConfig config;
  std::optional<DensityGrid> grid;

  double evaluate(const Vec3& query) const;
};

/// weight = beta * reward_norm + (1 - beta) * r_r, per stable point.
WeightedPoints blend_weights(const StableSet& stable, const ReceptacleSet& receptacle,
                             const BlendConfig& blend);

/// (1 / (N h)) * sum_i w_i exp(-|q - p_i|^2 / (2 h^2))
double kde_evaluate(const WeightedPoints& support, const KdeConfig& cfg, const Vec3& query);

DensityField build_density(const StableSet& stable, const ReceptacleSet& receptacle,
                           const BlendConfig& blend, const KdeConfig& kde,
                           const std::optional<GridSpec>& grid = std::nullopt,
                           unsigned threads = 0);

/// Evaluates the field on `spec`. Values are independent of `threads`.
DensityGrid evaluate_grid(const WeightedPoints& support, const KdeConfig& cfg,
                          const GridSpec& spec, unsigned threads = 0);

struct Candidate {
  Vec3 point;
  double density = 0.0;
  int rank = 0;  // 1 = best
};

struct CandidateList {
  std::vector<Candidate> candidates;
  std::uint64_t seed = 0;
  double min_separation = 0.02;
  int requested = 0;
  /// Fewer than `requested` points satisfied the separation constraint.
  bool short_list = false;
};

inline constexpr double kDefaultMinSeparation = 0.02;

/// Weighted draws without replacement among positive-weight support points,
/// probability proportional to the field value there. Draws closer than
/// `min_separation` to an accepted point are discarded. Sorted by density.
CandidateList sample_candidates(const DensityField& field, int k, double min_separation,
                                std::uint64_t seed);

/// "x,y,z,density" rows after a header line, x slowest.
std::string grid_to_text(const DensityGrid& grid);
/// u64 nx ny nz, f64 spacing[3], f64 origin[3], then f64 values; little-endian.
std::string grid_to_binary(const DensityGrid& grid);
DensityGrid grid_from_binary(std::string_view bytes);

}  // namespace placeplan
