#include "shaperet/spatial_grid.hpp"

#include <algorithm>
#include <cmath>

namespace shaperet {

SpatialGrid::SpatialGrid(std::span<const Vec3> points, double cell_size) : points_(points) {
  const auto box = bbox(points);
  const Vec3 extent = box.max - box.min;
  // Cap the cell count so a tiny radius on a huge mesh cannot explode memory.
  const double max_cells_per_axis = 256.0;
  cell_ = std::max({cell_size, extent.maxCoeff() / max_cells_per_axis, 1e-12});
  origin_ = box.min;
  for (int k = 0; k < 3; ++k) {
    dims_[k] = std::max(1, static_cast<int>(std::floor(extent[k] / cell_)) + 1);
  }
  const auto ncells = static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z();
  std::vector<std::size_t> cell_of_point(points.size());
  offset_.assign(ncells + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    cell_of_point[i] = cell_index(cell_of(points[i]));
    ++offset_[cell_of_point[i] + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) offset_[c + 1] += offset_[c];
  items_.resize(points.size());
  auto cursor = offset_;
  for (std::size_t i = 0; i < points.size(); ++i) {
    items_[cursor[cell_of_point[i]]++] = static_cast<Index>(i);
  }
}

Eigen::Vector3i SpatialGrid::cell_of(const Vec3& p) const {
  Eigen::Vector3i c;
  for (int k = 0; k < 3; ++k) {
    const int raw = static_cast<int>(std::floor((p[k] - origin_[k]) / cell_));
    c[k] = std::clamp(raw, 0, dims_[k] - 1);
  }
  return c;
}

void SpatialGrid::query(const Vec3& center, double radius, std::vector<Index>& out) const {
  out.clear();
  const Eigen::Vector3i lo = cell_of(center - Vec3::Constant(radius));
  const Eigen::Vector3i hi = cell_of(center + Vec3::Constant(radius));
  const double r2 = radius * radius;
  for (int z = lo.z(); z <= hi.z(); ++z) {
    for (int y = lo.y(); y <= hi.y(); ++y) {
      for (int x = lo.x(); x <= hi.x(); ++x) {
        const auto c = cell_index({x, y, z});
        for (auto k = offset_[c]; k < offset_[c + 1]; ++k) {
          const Index i = items_[k];
          if ((points_[i] - center).squaredNorm() <= r2) out.push_back(i);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
}

}  // namespace shaperet
