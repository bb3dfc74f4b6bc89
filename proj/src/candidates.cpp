#include "placeplan/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convex.hpp"
#include "placeplan/errors.hpp"

namespace placeplan {

namespace {

struct Span {
  double lo;
  double hi;
};

/// Vertical extents of every scene shape along one column.
class ColumnCaster {
 public:
  explicit ColumnCaster(const Scene& scene) {
    for (const auto& obj : scene.objects) {
      for (const auto& s : obj.shapes) {
        if (s.kind() == ShapeKind::sphere) {
          const Pose world = obj.pose * s.offset;
          spheres_.push_back({world.position, std::get<SphereDims>(s.dims).radius});
        } else {
          polys_.push_back(detail::make_polyhedron(s, obj.pose));
        }
      }
    }
  }

  std::vector<Span> spans(double x, double y) const {
    std::vector<Span> out;
    for (const auto& p : polys_) {
      if (auto s = detail::vertical_span(p, x, y)) out.push_back({s->first, s->second});
    }
    for (const auto& [c, r] : spheres_) {
      const double d2 = (x - c.x()) * (x - c.x()) + (y - c.y()) * (y - c.y());
      if (d2 > r * r) continue;
      const double h = std::sqrt(r * r - d2);
      out.push_back({c.z() - h, c.z() + h});
    }
    return out;
  }

 private:
  std::vector<detail::ConvexPolyhedron> polys_;
  std::vector<std::pair<Vec3, double>> spheres_;
};

std::vector<SurfaceHit> surfaces_from_spans(std::vector<Span> spans) {
  constexpr double eps = 1e-9;
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.hi > b.hi; });
  std::vector<SurfaceHit> hits;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const double top = spans[i].hi;
    bool buried = false;
    double ceiling = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spans.size(); ++j) {
      if (j == i) continue;
      if (spans[j].lo < top - eps && spans[j].hi > top + eps) buried = true;
      if (spans[j].lo >= top - eps && spans[j].hi > top + eps) ceiling = std::min(ceiling, spans[j].lo);
    }
    // Coincident tops (e.g. two flush boxes) count once.
    if (!hits.empty() && std::abs(hits.back().top - top) <= eps) continue;
    if (!buried) hits.push_back({top, ceiling});
  }
  return hits;
}

std::size_t axis_count(double lo, double hi, double res) {
  return static_cast<std::size_t>(std::floor((hi - lo) / res + 1e-9)) + 1;
}

}  // namespace

std::string to_string(ZMode mode) {
  switch (mode) {
    case ZMode::surface_snap: return "surface_snap";
    case ZMode::surface_levels: return "surface_levels";
    case ZMode::full_lattice: return "full_lattice";
  }
  return "surface_snap";
}

ZMode z_mode_from_string(const std::string& s) {
  if (s == "surface_snap") return ZMode::surface_snap;
  if (s == "surface_levels") return ZMode::surface_levels;
  if (s == "full_lattice") return ZMode::full_lattice;
  throw ValidationError("unknown z mode '" + s + "'");
}

std::vector<SurfaceHit> column_surfaces(const Scene& scene, double x, double y) {
  return surfaces_from_spans(ColumnCaster(scene).spans(x, y));
}

CandidateGrid generate_candidates(const Scene& scene, double resolution, ZMode mode,
                                  std::size_t point_cap) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw ContractViolation("candidate resolution must be positive");
  validate(scene);

  const Aabb& ws = scene.workspace;
  const std::size_t nx = axis_count(ws.min.x(), ws.max.x(), resolution);
  const std::size_t ny = axis_count(ws.min.y(), ws.max.y(), resolution);
  const std::size_t nz = axis_count(ws.min.z(), ws.max.z(), resolution);
  const double total = static_cast<double>(nx) * static_cast<double>(ny) * static_cast<double>(nz);
  if (total > static_cast<double>(point_cap)) {
    throw CapExceeded("workspace at resolution " + std::to_string(resolution) + " m yields " +
                      std::to_string(static_cast<long long>(total)) + " points (cap " +
                      std::to_string(point_cap) + "); use a coarser resolution");
  }

  CandidateGrid grid;
  grid.resolution = resolution;
  grid.source = CandidateSource::lattice;

  if (mode == ZMode::full_lattice) {
    grid.points.reserve(nx * ny * nz);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t k = 0; k < nz; ++k)
          grid.points.emplace_back(std::min(ws.min.x() + i * resolution, ws.max.x()),
                                   std::min(ws.min.y() + j * resolution, ws.max.y()),
                                   std::min(ws.min.z() + k * resolution, ws.max.z()));
    return grid;
  }

  // Offset from the object's origin down to its lowest point at the
  // canonical orientation.
  SceneObject probe = scene.placement_object;
  probe.pose.position = Vec3::Zero();
  const Aabb local = object_aabb(probe);
  const double lower = -local.min.z();
  const double height = local.size().z();

  const ColumnCaster caster(scene);
  constexpr double eps = 1e-9;
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = std::min(ws.min.x() + i * resolution, ws.max.x());
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = std::min(ws.min.y() + j * resolution, ws.max.y());
      const auto hits = surfaces_from_spans(caster.spans(x, y));
      std::vector<double> zs;
      for (const auto& hit : hits) {
        if (mode == ZMode::surface_snap) {
          zs.push_back(hit.top + lower);
          break;
        }
        if (hit.ceiling - hit.top >= height - eps) zs.push_back(hit.top + lower);
      }
      std::sort(zs.begin(), zs.end());
      for (double z : zs) {
        if (z < ws.min.z() - eps || z > ws.max.z() + eps) continue;
        grid.points.emplace_back(x, y, std::clamp(z, ws.min.z(), ws.max.z()));
      }
    }
  }
  return grid;
}

}  // namespace placeplan
