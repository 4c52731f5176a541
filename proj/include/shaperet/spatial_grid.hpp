#pragma once

#include <span>
#include <vector>

#include "shaperet/mesh.hpp"

namespace shaperet {

/// Uniform hash grid over a point set for fixed-radius neighbor queries.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const Vec3> points, double cell_size);

  /// Indices of points with |p - center| <= radius, ascending.
  void query(const Vec3& center, double radius, std::vector<Index>& out) const;

 private:
  std::span<const Vec3> points_;
  double cell_;
  Vec3 origin_;
  Eigen::Vector3i dims_;
  std::vector<std::size_t> offset_;
  std::vector<Index> items_;

  std::size_t cell_index(const Eigen::Vector3i& c) const {
    return (static_cast<std::size_t>(c.z()) * dims_.y() + c.y()) * dims_.x() + c.x();
  }
  Eigen::Vector3i cell_of(const Vec3& p) const;
};

}  // namespace shaperet
