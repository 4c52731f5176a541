#include "shaperet/descriptors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace shaperet {

namespace {

struct Sample {
  Vec3 pos;
  Vec3 normal;
  double k1, k2;
};

std::vector<Sample> materialize(std::span<const SurfacePoint> pts, const VertexGeometry& g) {
  std::vector<Sample> out;
  out.reserve(pts.size());
  const std::span<const Vec3> normals(g.normals);
  const std::span<const double> k1(g.kappa1), k2(g.kappa2);
  for (const auto& p : pts) {
    Vec3 n = p.interpolate(normals);
    const double len = n.norm();
    n = len > 0 ? Vec3(n / len) : Vec3::UnitZ();
    const double a = p.interpolate(k1), b = p.interpolate(k2);
    out.push_back({p.pos, n, std::max(a, b), std::min(a, b)});
  }
  return out;
}

// Angle between `ref` and the projection of `v` onto the plane spanned by
// `ref` and `along`. Falls back to the unprojected vector when the plane is
// undefined.
double projected_angle(const Vec3& ref, const Vec3& along, const Vec3& v) {
  Vec3 m = ref.cross(along);
  Vec3 proj = v;
  const double mlen = m.norm();
  if (mlen > 1e-12 * along.norm()) {
    m /= mlen;
    proj = v - v.dot(m) * m;
  }
  if (proj.squaredNorm() < 1e-24) return 0.0;
  return std::atan2(ref.cross(proj).norm(), ref.dot(proj));
}

// Total-least-squares plane: centroid and unit normal oriented along `up`.
std::pair<Vec3, Vec3> fit_plane(std::span<const Sample> s, const Vec3& up) {
  Vec3 c = Vec3::Zero();
  for (const auto& q : s) c += q.pos;
  c /= static_cast<double>(s.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& q : s) {
    const Vec3 d = q.pos - c;
    cov.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  Vec3 n = es.eigenvectors().col(0);
  if (n.dot(up) < 0) n = -n;
  return {c, n};
}

double center_value(DescriptorKind kind, const VertexGeometry& g, Index v) {
  const double k1 = g.kappa1[v], k2 = g.kappa2[v];
  switch (kind) {
    case DescriptorKind::DTP:
    case DescriptorKind::ND: return 0.0;
    case DescriptorKind::Mean: return 0.5 * (k1 + k2);
    case DescriptorKind::Gauss: return k1 * k2;
    case DescriptorKind::SI: return shape_index(k1, k2);
    case DescriptorKind::CI: return curvature_index(k1, k2);
  }
  return 0.0;
}

// Raw per-sample values of one ring; ch1 is used only by ND.
void eval_ring(DescriptorKind kind, std::span<const Sample> s, const Vec3& center_pos,
               const Vec3& center_normal, std::vector<double>& ch0, std::vector<double>& ch1) {
  ch0.clear();
  ch1.clear();
  switch (kind) {
    case DescriptorKind::DTP: {
      const auto [c, n] = fit_plane(s, center_normal);
      for (const auto& q : s) ch0.push_back((q.pos - c).dot(n));
      break;
    }
    case DescriptorKind::ND: {
      const auto count = s.size();
      for (std::size_t i = 0; i < count; ++i) {
        const auto& q = s[i];
        const auto& next = s[(i + 1) % count];
        ch0.push_back(projected_angle(center_normal, q.pos - center_pos, q.normal));
        ch1.push_back(projected_angle(q.normal, next.pos - q.pos, next.normal));
      }
      break;
    }
    case DescriptorKind::Mean:
      for (const auto& q : s) ch0.push_back(0.5 * (q.k1 + q.k2));
      break;
    case DescriptorKind::Gauss:
      for (const auto& q : s) ch0.push_back(q.k1 * q.k2);
      break;
    case DescriptorKind::SI:
      for (const auto& q : s) ch0.push_back(shape_index(q.k1, q.k2));
      break;
    case DescriptorKind::CI:
      for (const auto& q : s) ch0.push_back(curvature_index(q.k1, q.k2));
      break;
  }
}

Eigen::VectorXd eval_from_samples(DescriptorKind kind, const TriMesh& mesh,
                                  const VertexGeometry& g, Index v,
                                  const std::vector<std::optional<std::vector<Sample>>>& rings) {
  const int nrings = static_cast<int>(rings.size());
  const int nch = channels(kind);
  const int per_channel = nrings * kSamplesPerRing;
  Eigen::VectorXd out(nch * per_channel);
  const double fill = center_value(kind, g, v);
  std::vector<double> ch0, ch1;
  for (int r = 0; r < nrings; ++r) {
    const auto& ring = rings[r];
    if (!ring) {
      for (int c = 0; c < nch; ++c) {
        out.segment(c * per_channel + r * kSamplesPerRing, kSamplesPerRing).setConstant(fill);
      }
      continue;
    }
    eval_ring(kind, *ring, mesh.vertex(v), g.normals[v], ch0, ch1);
    const auto h0 = histogram_sample(ch0);
    for (int k = 0; k < kSamplesPerRing; ++k) out[r * kSamplesPerRing + k] = h0[k];
    if (nch == 2) {
      const auto h1 = histogram_sample(ch1);
      for (int k = 0; k < kSamplesPerRing; ++k) out[per_channel + r * kSamplesPerRing + k] = h1[k];
    }
  }
  return out;
}

std::vector<std::optional<std::vector<Sample>>> materialize_all(const SampledRings& rings,
                                                                const VertexGeometry& g) {
  std::vector<std::optional<std::vector<Sample>>> out;
  out.reserve(rings.size());
  for (const auto& r : rings) {
    if (r) {
      out.emplace_back(materialize(*r, g));
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::DTP: return "DTP";
    case DescriptorKind::ND: return "ND";
    case DescriptorKind::Mean: return "Mean";
    case DescriptorKind::Gauss: return "Gauss";
    case DescriptorKind::SI: return "SI";
    case DescriptorKind::CI: return "CI";
  }
  return "?";
}

DescriptorKind parse_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto k : kAllKinds) {
    std::string ref(to_string(k));
    std::transform(ref.begin(), ref.end(), ref.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ref == lower) return k;
  }
  throw std::invalid_argument("unknown descriptor kind '" + std::string(name) +
                              "' (expected DTP, ND, Mean, Gauss, SI or CI)");
}

double shape_index(double k1, double k2) {
  if (k1 < k2) std::swap(k1, k2);
  // atan(a / b) with b = k2 - k1 <= 0, rewritten so the umbilic limit is finite.
  return (2.0 / std::numbers::pi) * std::atan2(-(k1 + k2), k1 - k2);
}

double curvature_index(double k1, double k2) { return std::sqrt(0.5 * (k1 * k1 + k2 * k2)); }

SampledRings sample_rings(const TriMesh& mesh, const VertexGeometry& geometry,
                          const RingSet& rings) {
  SampledRings out;
  out.reserve(rings.rings.size());
  const Vec3& p = mesh.vertex(rings.center);
  const Vec3& n = geometry.normals[rings.center];
  for (std::size_t j = 0; j < rings.rings.size(); ++j) {
    const auto& ring = rings.rings[j];
    if (!ring) {
      out.emplace_back(std::nullopt);
      continue;
    }
    // Start at the ring point highest above the tangent plane: intrinsic, so
    // the samples move with the mesh under rigid motion.
    const auto top = std::max_element(ring->points.begin(), ring->points.end(),
                                      [&](const SurfacePoint& a, const SurfacePoint& b) {
                                        return (a.pos - p).dot(n) < (b.pos - p).dot(n);
                                      });
    const double spacing =
        2.0 * std::numbers::pi * rings.radii[j] / static_cast<double>(kSamplesPerCircle);
    out.push_back(resample_ring(*ring, spacing, top->pos));
  }
  return out;
}

Eigen::VectorXd eval_descriptor(DescriptorKind kind, const TriMesh& mesh,
                                const VertexGeometry& geometry, Index vertex,
                                const SampledRings& samples) {
  return eval_from_samples(kind, mesh, geometry, vertex, materialize_all(samples, geometry));
}

Eigen::VectorXd eval_descriptor(DescriptorKind kind, const TriMesh& mesh,
                                const VertexGeometry& geometry, Index vertex,
                                const RingSet& rings) {
  return eval_descriptor(kind, mesh, geometry, vertex, sample_rings(mesh, geometry, rings));
}

std::vector<DescriptorField> compute_fields(std::span<const DescriptorKind> kinds,
                                            const TriMesh& mesh, const VertexGeometry& geometry,
                                            int rings, Exec exec) {
  const auto nv = mesh.num_vertices();
  const double diag = bbox(mesh).diagonal();
  const auto radii = ring_radii(diag, rings);
  std::vector<DescriptorField> fields;
  for (auto kind : kinds) {
    DescriptorField f;
    f.mesh_id = mesh.id();
    f.kind = kind;
    f.values.resize(static_cast<Eigen::Index>(nv), raw_length(kind, rings));
    fields.push_back(std::move(f));
  }
  parallel_for(nv, exec, [&](std::size_t i) {
    const auto v = static_cast<Index>(i);
    const auto set = build_ring_set(mesh, geometry.normals[v], v, radii);
    const auto samples = materialize_all(sample_rings(mesh, geometry, set), geometry);
    for (auto& f : fields) {
      f.values.row(static_cast<Eigen::Index>(i)) =
          eval_from_samples(f.kind, mesh, geometry, v, samples).transpose();
    }
  });
  return fields;
}

DescriptorField compute_field(DescriptorKind kind, const TriMesh& mesh,
                              const VertexGeometry& geometry, int rings, Exec exec) {
  const std::array<DescriptorKind, 1> one{kind};
  return std::move(compute_fields(one, mesh, geometry, rings, exec).front());
}

}  // namespace shaperet
