#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shaperet/mesh.hpp"

namespace shaperet {

/// Selected vertices of one mesh. `flagged` marks a method that found no
/// usable points (the set is then empty).
struct SamplePointSet {
  std::string mesh_id;
  std::string method;
  std::vector<Index> indices;
  std::vector<double> scores;  // empty or one per index
  bool flagged = false;
};

/// n distinct vertices drawn uniformly without replacement, in draw order.
SamplePointSet random_points(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

// ---- mesh saliency (Lee et al.) ----

struct MeshSaliencyParams {
  double epsilon_fraction = 0.003;               // of the bbox diagonal
  std::vector<double> scale_factors{2, 3, 4, 5, 6};
  /// A scale map whose raw range is below this fraction of the mean |H| is
  /// treated as numerically flat and contributes nothing. Curvature noise on
  /// a subdivided icosphere stays under 1% of |H|.
  double flat_tolerance = 0.02;
};

struct SaliencyField {
  std::vector<std::vector<double>> scale_maps;  // raw |DoG| per scale
  std::vector<double> combined;                 // sum of suppressed normalized maps
};

/// Gaussian-weighted average of `values` around each vertex over the
/// Euclidean ball of radius 2 * sigma.
std::vector<double> gaussian_average(const TriMesh& mesh, std::span<const double> values,
                                     double sigma, Exec exec = Exec::Parallel);

/// S(g) = g * (max(g) - m)^2, m = mean of the strict local maxima other than
/// the global one (0 when there are none).
std::vector<double> suppress(const TriMesh& mesh, std::span<const double> map);

SaliencyField mesh_saliency_field(const TriMesh& mesh, const VertexGeometry& geometry,
                                  const MeshSaliencyParams& params = {},
                                  Exec exec = Exec::Parallel);
SamplePointSet mesh_saliency(const TriMesh& mesh, const VertexGeometry& geometry,
                             const MeshSaliencyParams& params = {}, Exec exec = Exec::Parallel);

// ---- salient points (Castellani et al.) ----

struct CastellaniParams {
  double epsilon_fraction = 0.001;
  std::vector<double> scale_factors{1, 2, 3, 4, 5, 6};
  std::vector<double> decimation_levels{0.0, 0.2, 0.4, 0.6, 0.8};
  double inhibition_percentile = 0.85;
  int neighborhood_rings = 2;  // inhibition and non-maximum suppression
  int min_levels = 3;
  /// Per-scale maps whose range is below this fraction of sigma are treated
  /// as flat; sampling noise on a sphere stays near 0.06 sigma.
  double flat_tolerance = 0.1;
};

/// Keeps map[v] when it exceeds the given percentile of values over the
/// `rings`-ring neighborhood of v (v included), else 0.
std::vector<double> inhibit(const TriMesh& mesh, std::span<const double> map, double percentile,
                            int rings);

/// Salient vertices of a single mesh (one decimation level).
std::vector<Index> castellani_level(const TriMesh& mesh, const CastellaniParams& params,
                                    Exec exec = Exec::Parallel);
SamplePointSet castellani_points(const TriMesh& mesh, const CastellaniParams& params = {},
                                 Exec exec = Exec::Parallel);

// ---- 3D Harris (Sipiran and Bustos) ----

enum class NeighborhoodType { Adaptive, Rings };

struct HarrisParams {
  NeighborhoodType neighborhood = NeighborhoodType::Adaptive;
  /// Adaptive: fraction of the bbox diagonal. Rings: number of rings.
  double neighborhood_param = 0.01;
  double k = 0.04;
  int ring_maxima = 1;
  double selection_fraction = 0.01;

  static HarrisParams adaptive();
  static HarrisParams rings();
};

/// det(E) - k tr(E)^2.
double harris_response(const Eigen::Matrix2d& e, double k);

/// Harris response at every vertex.
std::vector<double> harris_responses(const TriMesh& mesh, const HarrisParams& params,
                                     Exec exec = Exec::Parallel);
SamplePointSet harris3d(const TriMesh& mesh, const HarrisParams& params,
                        Exec exec = Exec::Parallel);

// ---- text serialization ----

std::string serialize_points(const SamplePointSet& set);
SamplePointSet parse_points(std::string_view text);
void write_points(const SamplePointSet& set, const std::filesystem::path& path);
SamplePointSet read_points(const std::filesystem::path& path);

}  // namespace shaperet
