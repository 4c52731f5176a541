#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "shaperet/mesh.hpp"

namespace shaperet {

/// Number of percentile samples kept per ring.
inline constexpr int kSamplesPerRing = 7;
/// Default number of concentric rings per vertex.
inline constexpr int kDefaultRings = 5;
/// Outermost ring radius as a fraction of the bounding-box diagonal.
inline constexpr double kRingExtent = 0.0375;
/// Samples per full circle of radius r: spacing is 2*pi*r / kSamplesPerCircle.
inline constexpr int kSamplesPerCircle = 20;

/// A point on the surface with barycentric-style weights over mesh vertices,
/// used to interpolate per-vertex attributes. Unused slots carry weight 0.
struct SurfacePoint {
  Vec3 pos = Vec3::Zero();
  std::array<Index, 4> verts{};
  std::array<double, 4> weights{};

  template <typename T>
  T interpolate(std::span<const T> values) const {
    T acc = values[verts[0]] * weights[0];
    for (int k = 1; k < 4; ++k) acc += values[verts[k]] * weights[k];
    return acc;
  }
};

struct Polyline {
  std::vector<SurfacePoint> points;
  bool closed = true;

  double length() const;
};

/// Concentric rings around one vertex; `rings[j]` is empty when the sphere of
/// radius `radii[j]` did not yield a usable intersection curve.
struct RingSet {
  Index center = 0;
  std::vector<double> radii;
  std::vector<std::optional<Polyline>> rings;
};

/// Radii j * (B * kRingExtent / R) for j = 1..R.
std::vector<double> ring_radii(double diagonal, int rings = kDefaultRings);

/// The sphere-surface intersection curve around vertex `center`, oriented
/// counterclockwise about `normal`. Empty when the sphere misses the surface
/// patch connected to the center.
std::optional<Polyline> extract_ring(const TriMesh& mesh, Index center, const Vec3& normal,
                                     double radius);

/// Points at arc-length steps of `spacing`, starting at the polyline point
/// closest to `start_hint`. Count is floor(L / spacing), at least 3. Empty
/// when the polyline is shorter than 3 * spacing.
std::optional<std::vector<SurfacePoint>> resample_ring(const Polyline& ring, double spacing,
                                                       const Vec3& start_hint);

/// Sorted values at the 0/10/30/50/70/90/100 percent positions, index
/// round(p * (n - 1)) with halves rounded up.
std::array<double, kSamplesPerRing> histogram_sample(std::span<const double> values);

RingSet build_ring_set(const TriMesh& mesh, const Vec3& normal, Index center,
                       std::span<const double> radii);

}  // namespace shaperet
