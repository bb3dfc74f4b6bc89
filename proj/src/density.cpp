#include "placeplan/density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "placeplan/errors.hpp"

namespace placeplan {

static_assert(std::endian::native == std::endian::little,
              "the binary grid layout is written in host order");

void KdeConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ValidationError("kde.bandwidth must be positive");
}

void BlendConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("blend.beta must lie in [0, 1]");
}

GridSpec GridSpec::covering(const Aabb& box, double spacing, std::uint64_t max_cells) {
  if (box.empty() || !(spacing > 0.0)) throw ContractViolation("grid needs a box and a spacing");
  if (max_cells < 1) throw ContractViolation("grid needs at least one cell");
  const Vec3 extent = box.size();
  GridSpec g;
  g.origin = box.min;
  for (double s = spacing;; s *= 1.25) {
    for (int a = 0; a < 3; ++a) {
      g.dims[a] = static_cast<std::uint64_t>(std::floor(extent[a] / s + 1e-9)) + 1;
    }
    g.spacing = Vec3::Constant(s);
    if (g.size() <= max_cells) return g;
  }
}

Vec3 GridSpec::point(std::uint64_t linear) const {
  const std::uint64_t iz = linear % dims[2];
  const std::uint64_t iy = (linear / dims[2]) % dims[1];
  const std::uint64_t ix = linear / (dims[2] * dims[1]);
  return origin + Vec3(static_cast<double>(ix) * spacing.x(), static_cast<double>(iy) * spacing.y(),
                       static_cast<double>(iz) * spacing.z());
}

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] == 0) throw ValidationError("grid dimensions must be positive");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw ValidationError("grid spacing must be positive");
  }
  if (!is_finite(origin)) throw ValidationError("grid origin must be finite");
}

std::uint64_t DensityGrid::argmax() const {
  if (values.empty()) throw ContractViolation("empty density grid");
  return static_cast<std::uint64_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double DensityField::evaluate(const Vec3& query) const { return kde_evaluate(support, config, query); }

WeightedPoints blend_weights(const StableSet& stable, const ReceptacleSet& receptacle,
                             const BlendConfig& blend) {
  blend.validate();
  if (stable.entries.size() != receptacle.entries.size())
    throw ContractViolation("receptacle set does not align with the stable set");
  WeightedPoints out;
  out.points.reserve(stable.entries.size());
  out.weights.reserve(stable.entries.size());
  for (std::size_t i = 0; i < stable.entries.size(); ++i) {
    const auto& s = stable.entries[i];
    const auto& r = receptacle.entries[i];
    if (s.point != r.point) throw ContractViolation("receptacle set does not align with the stable set");
    out.points.push_back(s.point);
    out.weights.push_back(blend.beta * s.reward_norm + (1.0 - blend.beta) * r.reward);
  }
  return out;
}

double kde_evaluate(const WeightedPoints& support, const KdeConfig& cfg, const Vec3& query) {
  if (support.points.empty()) throw ContractViolation("kde support is empty");
  if (support.points.size() != support.weights.size())
    throw ContractViolation("kde support points and weights differ in length");
  const double h = cfg.bandwidth;
  const double inv = 1.0 / (h * h);
  double sum = 0.0;
  for (std::size_t i = 0; i < support.points.size(); ++i) {
    if (support.weights[i] == 0.0) continue;
    sum += support.weights[i] * std::exp(-0.5 * (query - support.points[i]).squaredNorm() * inv);
  }
  return sum / (static_cast<double>(support.points.size()) * h);
}

DensityGrid evaluate_grid(const WeightedPoints& support, const KdeConfig& cfg, const GridSpec& spec,
                          unsigned threads) {
  cfg.validate();
  spec.validate();
  DensityGrid grid{spec, std::vector<double>(spec.size())};
  const std::uint64_t n = spec.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) grid.values[i] = kde_evaluate(support, cfg, spec.point(i));
  };
  if (threads <= 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t b = std::min(n, t * chunk);
      pool.emplace_back(fill, b, std::min(n, b + chunk));
    }
    for (auto& th : pool) th.join();
  }
  return grid;
}

DensityField build_density(const StableSet& stable, const ReceptacleSet& receptacle,
                           const BlendConfig& blend, const KdeConfig& kde,
                           const std::optional<GridSpec>& grid, unsigned threads) {
  kde.validate();
  DensityField field;
  field.support = blend_weights(stable, receptacle, blend);
  field.config = kde;
  if (grid && !field.support.points.empty())
    field.grid = evaluate_grid(field.support, kde, *grid, threads);
  return field;
}

CandidateList sample_candidates(const DensityField& field, int k, double min_separation,
                                std::uint64_t seed) {
  if (k < 1) throw ContractViolation("k must be at least 1");
  if (!(min_separation >= 0.0)) throw ContractViolation("min_separation must be non-negative");
  if (field.support.points.empty()) throw ContractViolation("density support is empty");

  struct Option {
    std::size_t index;
    double density;
  };
  std::vector<Option> pool;
  for (std::size_t i = 0; i < field.support.points.size(); ++i) {
    if (!(field.support.weights[i] > 0.0)) continue;
    const double d = field.evaluate(field.support.points[i]);
    if (d > 0.0) pool.push_back({i, d});
  }
  if (pool.empty()) throw NoCandidates("combined density is zero everywhere on the support");

  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Option> accepted;
  const double sep2 = min_separation * min_separation;
  while (static_cast<int>(accepted.size()) < k && !pool.empty()) {
    double total = 0.0;
    for (const auto& o : pool) total += o.density;
    const double target = uniform() * total;
    std::size_t pick = pool.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      acc += pool[j].density;
      if (target < acc) {
        pick = j;
        break;
      }
    }
    const Option chosen = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    const Vec3& p = field.support.points[chosen.index];
    const bool clear = std::none_of(accepted.begin(), accepted.end(), [&](const Option& a) {
      return (field.support.points[a.index] - p).squaredNorm() < sep2;
    });
    if (clear) accepted.push_back(chosen);
  }
  std::stable_sort(accepted.begin(), accepted.end(), [](const Option& a, const Option& b) {
    return a.density > b.density || (a.density == b.density && a.index < b.index);
  });

  CandidateList out;
  out.seed = seed;
  out.min_separation = min_separation;
  out.requested = k;
  out.short_list = static_cast<int>(accepted.size()) < k;
  int rank = 1;
  for (const auto& a : accepted) out.candidates.push_back({field.support.points[a.index], a.density, rank++});
  return out;
}

std::string grid_to_text(const DensityGrid& grid) {
  std::ostringstream out;
  out.precision(17);
  out << "x,y,z,density\n";
  for (std::uint64_t i = 0; i < grid.values.size(); ++i) {
    const Vec3 p = grid.spec.point(i);
    out << p.x() << ',' << p.y() << ',' << p.z() << ',' << grid.values[i] << '\n';
  }
  return out.str();
}

namespace {

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(std::string_view bytes, std::size_t& at) {
  if (at + sizeof(T) > bytes.size()) throw ValidationError("binary density grid is truncated");
  T v;
  std::memcpy(&v, bytes.data() + at, sizeof(T));
  at += sizeof(T);
  return v;
}

}  // namespace

std::string grid_to_binary(const DensityGrid& grid) {
  std::string out;
  out.reserve(72 + 8 * grid.values.size());
  for (auto d : grid.spec.dims) put<std::uint64_t>(out, d);
  for (int a = 0; a < 3; ++a) put<double>(out, grid.spec.spacing[a]);
  for (int a = 0; a < 3; ++a) put<double>(out, grid.spec.origin[a]);
  for (double v : grid.values) put<double>(out, v);
  return out;
}

DensityGrid grid_from_binary(std::string_view bytes) {
  DensityGrid grid;
  std::size_t at = 0;
  for (auto& d : grid.spec.dims) d = take<std::uint64_t>(bytes, at);
  for (int a = 0; a < 3; ++a) grid.spec.spacing[a] = take<double>(bytes, at);
  for (int a = 0; a < 3; ++a) grid.spec.origin[a] = take<double>(bytes, at);
  grid.spec.validate();
  const std::uint64_t n = grid.spec.size();
  if ((bytes.size() - at) != n * sizeof(double))
    throw ValidationError("binary density grid payload does not match its header");
  grid.values.resize(n);
  for (auto& v : grid.values) v = take<double>(bytes, at);
  return grid;
}

}  // namespace placeplan
