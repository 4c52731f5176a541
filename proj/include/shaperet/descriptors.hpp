#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "shaperet/mesh.hpp"
#include "shaperet/ring_sampler.hpp"

namespace shaperet {

enum class DescriptorKind { DTP, ND, Mean, Gauss, SI, CI };

inline constexpr std::array<DescriptorKind, 6> kAllKinds{
    DescriptorKind::DTP, DescriptorKind::ND, DescriptorKind::Mean,
    DescriptorKind::Gauss, DescriptorKind::SI, DescriptorKind::CI};

std::string_view to_string(DescriptorKind kind);
/// Accepts the short names DTP, ND, Mean, Gauss, SI, CI (case-insensitive).
DescriptorKind parse_kind(std::string_view name);

/// Normal distribution carries two angles per sample; every other kind one scalar.
constexpr int channels(DescriptorKind kind) { return kind == DescriptorKind::ND ? 2 : 1; }
constexpr int raw_length(DescriptorKind kind, int rings = kDefaultRings) {
  return channels(kind) * rings * kSamplesPerRing;
}

/// (2/pi) atan((k2 + k1) / (k2 - k1)) with k1 >= k2; umbilics map to -sign(k1 + k2).
double shape_index(double k1, double k2);
/// sqrt((k1^2 + k2^2) / 2).
double curvature_index(double k1, double k2);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raw descriptor vectors at every vertex of one mesh.
struct DescriptorField {
  std::string mesh_id;
  DescriptorKind kind = DescriptorKind::Mean;
  RowMatrix values;  // V x raw_length

  std::size_t num_vertices() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
};

/// Resampled ring points around one vertex; an empty entry marks a ring that
/// is missing or too short, which the descriptor fills with the center value.
using SampledRings = std::vector<std::optional<std::vector<SurfacePoint>>>;

SampledRings sample_rings(const TriMesh& mesh, const VertexGeometry& geometry, const RingSet& rings);

Eigen::VectorXd eval_descriptor(DescriptorKind kind, const TriMesh& mesh,
                                const VertexGeometry& geometry, Index vertex,
                                const RingSet& rings);
Eigen::VectorXd eval_descriptor(DescriptorKind kind, const TriMesh& mesh,
                                const VertexGeometry& geometry, Index vertex,
                                const SampledRings& samples);

/// Descriptor fields for several kinds; rings are extracted once per vertex.
std::vector<DescriptorField> compute_fields(std::span<const DescriptorKind> kinds,
                                            const TriMesh& mesh, const VertexGeometry& geometry,
                                            int rings = kDefaultRings, Exec exec = Exec::Parallel);

DescriptorField compute_field(DescriptorKind kind, const TriMesh& mesh,
                              const VertexGeometry& geometry, int rings = kDefaultRings,
                              Exec exec = Exec::Parallel);

}  // namespace shaperet
