#include "shaperet/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "shaperet/random.hpp"
#include "shaperet/spatial_grid.hpp"

namespace shaperet {

namespace {

// Vertices whose value is strictly greater than every vertex in their
// `rings`-ring neighborhood.
std::vector<Index> strict_local_maxima(const TriMesh& mesh, std::span<const double> values,
                                       int rings) {
  std::vector<Index> out;
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    const auto nbrs = rings == 1 ? std::vector<Index>(mesh.neighbors(v).begin(),
                                                      mesh.neighbors(v).end())
                                 : vertex_rings(mesh, v, rings);
    if (nbrs.empty()) continue;
    bool is_max = true;
    for (Index u : nbrs) {
      if (!(values[v] > values[u])) {
        is_max = false;
        break;
      }
    }
    if (is_max) out.push_back(v);
  }
  return out;
}

// Min-max normalization to [0, 1]; flat maps (range <= floor) become all zero.
std::vector<double> normalize_map(std::span<const double> map, double floor) {
  const auto [lo, hi] = std::minmax_element(map.begin(), map.end());
  std::vector<double> out(map.size(), 0.0);
  const double range = *hi - *lo;
  if (!(range > floor)) return out;
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = (map[i] - *lo) / range;
  return out;
}

// Gaussian-weighted average of vertex positions within radius 2 * sigma.
std::vector<Vec3> gaussian_positions(const TriMesh& mesh, const SpatialGrid& grid, double sigma,
                                     Exec exec) {
  std::vector<Vec3> out(mesh.num_vertices());
  const double radius = 2.0 * sigma;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  parallel_for(mesh.num_vertices(), exec, [&](std::size_t i) {
    std::vector<Index> nbrs;
    const Vec3& p = mesh.vertex(static_cast<Index>(i));
    grid.query(p, radius, nbrs);
    Vec3 acc = Vec3::Zero();
    double wsum = 0.0;
    for (Index q : nbrs) {
      const double w = std::exp(-(mesh.vertex(q) - p).squaredNorm() * inv);
      acc += w * mesh.vertex(q);
      wsum += w;
    }
    out[i] = acc / wsum;
  });
  return out;
}

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace

SamplePointSet random_points(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  const auto nv = mesh.num_vertices();
  if (n < 1 || n > nv) {
    throw std::invalid_argument("cannot draw " + std::to_string(n) + " distinct vertices from " +
                                std::to_string(nv));
  }
  std::vector<Index> pool(nv);
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + rng.below(nv - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return {mesh.id(), "random", std::move(pool), {}, false};
}

// ---- mesh saliency ----

std::vector<double> gaussian_average(const TriMesh& mesh, std::span<const double> values,
                                     double sigma, Exec exec) {
  const SpatialGrid grid(mesh.vertices(), 2.0 * sigma);
  std::vector<double> out(mesh.num_vertices());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  parallel_for(mesh.num_vertices(), exec, [&](std::size_t i) {
    std::vector<Index> nbrs;
    const Vec3& p = mesh.vertex(static_cast<Index>(i));
    grid.query(p, 2.0 * sigma, nbrs);
    double acc = 0.0, wsum = 0.0;
    for (Index q : nbrs) {
      const double w = std::exp(-(mesh.vertex(q) - p).squaredNorm() * inv);
      acc += w * values[q];
      wsum += w;
    }
    out[i] = acc / wsum;
  });
  return out;
}

std::vector<double> suppress(const TriMesh& mesh, std::span<const double> map) {
  std::vector<double> out(map.begin(), map.end());
  const auto maxima = strict_local_maxima(mesh, map, 1);
  if (maxima.empty()) return out;
  const double top = *std::max_element(map.begin(), map.end());
  // Mean over the local maxima other than the global one (a lone peak keeps weight top^2).
  double mean = 0.0;
  std::size_t count = 0;
  bool skipped = false;
  for (Index v : maxima) {
    if (!skipped && map[v] == top) {
      skipped = true;
      continue;
    }
    mean += map[v];
    ++count;
  }
  if (count) mean /= static_cast<double>(count);
  const double factor = (top - mean) * (top - mean);
  for (auto& x : out) x *= factor;
  return out;
}

SaliencyField mesh_saliency_field(const TriMesh& mesh, const VertexGeometry& geometry,
                                  const MeshSaliencyParams& params, Exec exec) {
  const auto nv = mesh.num_vertices();
  std::vector<double> h(nv);
  double mean_abs = 0.0;
  for (Index v = 0; v < nv; ++v) {
    h[v] = geometry.mean(v);
    mean_abs += std::abs(h[v]);
  }
  mean_abs /= static_cast<double>(nv);
  const double eps = params.epsilon_fraction * bbox(mesh).diagonal();

  SaliencyField field;
  field.combined.assign(nv, 0.0);
  for (double f : params.scale_factors) {
    const double sigma = f * eps;
    const auto fine = gaussian_average(mesh, h, sigma, exec);
    const auto coarse = gaussian_average(mesh, h, 2.0 * sigma, exec);
    std::vector<double> raw(nv);
    for (Index v = 0; v < nv; ++v) raw[v] = std::abs(fine[v] - coarse[v]);
    const auto normalized = normalize_map(raw, params.flat_tolerance * mean_abs);
    const auto suppressed = suppress(mesh, normalized);
    for (Index v = 0; v < nv; ++v) field.combined[v] += suppressed[v];
    field.scale_maps.push_back(std::move(raw));
  }
  return field;
}

SamplePointSet mesh_saliency(const TriMesh& mesh, const VertexGeometry& geometry,
                             const MeshSaliencyParams& params, Exec exec) {
  const auto field = mesh_saliency_field(mesh, geometry, params, exec);
  const auto& gamma = field.combined;
  const auto candidates = strict_local_maxima(mesh, gamma, 1);
  SamplePointSet out{mesh.id(), "mesh-saliency", {}, {}, false};
  if (candidates.empty()) {
    out.flagged = true;
    return out;
  }
  double mean = 0.0;
  for (Index v : candidates) mean += gamma[v];
  mean /= static_cast<double>(candidates.size());
  for (Index v : candidates) {
    if (gamma[v] > mean) {
      out.indices.push_back(v);
      out.scores.push_back(gamma[v]);
    }
  }
  out.flagged = out.indices.empty();
  return out;
}

// ---- salient points ----

std::vector<double> inhibit(const TriMesh& mesh, std::span<const double> map, double pct,
                            int rings) {
  std::vector<double> out(map.size(), 0.0);
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    auto nbrs = vertex_rings(mesh, v, rings);
    std::vector<double> vals;
    vals.reserve(nbrs.size() + 1);
    vals.push_back(map[v]);
    for (Index u : nbrs) vals.push_back(map[u]);
    if (map[v] > percentile(std::move(vals), pct)) out[v] = map[v];
  }
  return out;
}

std::vector<Index> castellani_level(const TriMesh& mesh, const CastellaniParams& params,
                                    Exec exec) {
  const auto nv = mesh.num_vertices();
  if (nv == 0) return {};
  const auto geometry = estimate_geometry(mesh, exec);
  const double eps = params.epsilon_fraction * bbox(mesh).diagonal();
  std::vector<double> saliency(nv, 0.0);
  for (double f : params.scale_factors) {
    const double sigma = f * eps;
    const SpatialGrid grid(mesh.vertices(), 4.0 * sigma);
    const auto fine = gaussian_positions(mesh, grid, sigma, exec);
    const auto coarse = gaussian_positions(mesh, grid, 2.0 * sigma, exec);
    std::vector<double> scale_map(nv);
    for (Index v = 0; v < nv; ++v) {
      scale_map[v] = std::abs((fine[v] - coarse[v]).dot(geometry.normals[v]));
    }
    const auto normalized = normalize_map(scale_map, params.flat_tolerance * sigma);
    const auto inhibited =
        inhibit(mesh, normalized, params.inhibition_percentile, params.neighborhood_rings);
    for (Index v = 0; v < nv; ++v) saliency[v] += normalized[v] + inhibited[v];
  }
  return strict_local_maxima(mesh, saliency, params.neighborhood_rings);
}

SamplePointSet castellani_points(const TriMesh& mesh, const CastellaniParams& params, Exec exec) {
  std::vector<int> hits(mesh.num_vertices(), 0);
  int levels_done = 0;
  for (double d : params.decimation_levels) {
    Decimation level;
    try {
      level = decimate(mesh, d);
    } catch (const MeshError&) {
      continue;
    }
    if (level.exhausted || level.mesh.num_vertices() == 0) continue;
    ++levels_done;
    for (Index v : castellani_level(level.mesh, params, exec)) ++hits[level.to_original[v]];
  }
  SamplePointSet out{mesh.id(), "salient-points", {}, {}, false};
  if (levels_done < params.min_levels) {
    out.flagged = true;
    return out;
  }
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    if (hits[v] >= params.min_levels) {
      out.indices.push_back(v);
      out.scores.push_back(hits[v]);
    }
  }
  out.flagged = out.indices.empty();
  return out;
}

// ---- 3D Harris ----

HarrisParams HarrisParams::adaptive() { return {}; }

HarrisParams HarrisParams::rings() {
  HarrisParams p;
  p.neighborhood = NeighborhoodType::Rings;
  p.neighborhood_param = 1;
  p.k = 0.01;
  p.ring_maxima = 1;
  p.selection_fraction = 0.05;
  return p;
}

double harris_response(const Eigen::Matrix2d& e, double k) {
  const double tr = e.trace();
  return e.determinant() - k * tr * tr;
}

namespace {

std::vector<Index> harris_neighborhood(const TriMesh& mesh, Index v, const HarrisParams& params,
                                       double diagonal) {
  if (params.neighborhood == NeighborhoodType::Rings) {
    return vertex_rings(mesh, v, std::max(1, static_cast<int>(std::lround(params.neighborhood_param))));
  }
  const double target = params.neighborhood_param * diagonal;
  const Vec3& p = mesh.vertex(v);
  std::vector<Index> out;
  std::vector<Index> visited{v};
  std::vector<Index> frontier{v};
  // Grow whole rings until the farthest vertex reaches the target extent.
  constexpr int kMaxRings = 64;
  for (int depth = 1; depth <= kMaxRings; ++depth) {
    std::vector<Index> next;
    for (Index u : frontier) {
      for (Index w : mesh.neighbors(u)) next.push_back(w);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    std::vector<Index> fresh;
    std::set_difference(next.begin(), next.end(), visited.begin(), visited.end(),
                        std::back_inserter(fresh));
    if (fresh.empty()) break;
    std::vector<Index> merged;
    std::merge(visited.begin(), visited.end(), fresh.begin(), fresh.end(),
               std::back_inserter(merged));
    visited.swap(merged);
    double extent = 0.0;
    for (Index w : fresh) {
      out.push_back(w);
      extent = std::max(extent, (mesh.vertex(w) - p).norm());
    }
    frontier.swap(fresh);
    if (extent >= target) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double harris_at(const TriMesh& mesh, Index v, const HarrisParams& params, double diagonal) {
  auto nbrs = harris_neighborhood(mesh, v, params, diagonal);
  nbrs.push_back(v);
  if (nbrs.size() < 6) return 0.0;
  const Vec3& p = mesh.vertex(v);

  Vec3 centroid = Vec3::Zero();
  double extent = 0.0;
  for (Index q : nbrs) {
    centroid += mesh.vertex(q);
    extent = std::max(extent, (mesh.vertex(q) - p).norm());
  }
  centroid /= static_cast<double>(nbrs.size());
  if (!(extent > 0.0)) return 0.0;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (Index q : nbrs) {
    const Vec3 d = mesh.vertex(q) - centroid;
    cov.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Vec3 n = es.eigenvectors().col(0);
  const Vec3 ex = es.eigenvectors().col(2);
  const Vec3 ey = n.cross(ex);

  // Fit f(x, y) = p1/2 x^2 + p2 xy + p3/2 y^2 + p4 x + p5 y + p6 in units of
  // the neighborhood extent.
  const auto m = static_cast<Eigen::Index>(nbrs.size());
  Eigen::MatrixXd a(m, 6);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vec3 d = (mesh.vertex(nbrs[i]) - p) / extent;
    const double x = d.dot(ex), y = d.dot(ey);
    a.row(i) << 0.5 * x * x, x * y, 0.5 * y * y, x, y, 1.0;
    b[i] = d.dot(n);
  }
  const auto qr = a.colPivHouseholderQr();
  if (qr.rank() < 6) return 0.0;
  const Eigen::VectorXd c = qr.solve(b);
  // Back to model units: second-order terms scale by 1/extent, slopes are unitless.
  const double p1 = c[0] / extent, p2 = c[1] / extent, p3 = c[2] / extent;
  const double p4 = c[3], p5 = c[4];

  const double sigma = extent / 2.0;
  const double s2 = sigma * sigma;
  // Closed-form Gaussian integrals of f_x^2, f_x f_y, f_y^2 with the
  // 1 / sqrt(2 pi sigma) prefactor.
  const double scale = 2.0 * std::numbers::pi * s2 / std::sqrt(2.0 * std::numbers::pi * sigma);
  Eigen::Matrix2d e;
  e(0, 0) = scale * (p4 * p4 + s2 * (p1 * p1 + p2 * p2));
  e(1, 1) = scale * (p5 * p5 + s2 * (p2 * p2 + p3 * p3));
  e(0, 1) = e(1, 0) = scale * (p4 * p5 + s2 * (p1 * p2 + p2 * p3));
  return harris_response(e, params.k);
}

}  // namespace

std::vector<double> harris_responses(const TriMesh& mesh, const HarrisParams& params, Exec exec) {
  const double diag = bbox(mesh).diagonal();
  std::vector<double> h(mesh.num_vertices(), 0.0);
  parallel_for(mesh.num_vertices(), exec,
               [&](std::size_t i) { h[i] = harris_at(mesh, static_cast<Index>(i), params, diag); });
  return h;
}

SamplePointSet harris3d(const TriMesh& mesh, const HarrisParams& params, Exec exec) {
  if (params.selection_fraction < 0.0 || params.selection_fraction > 1.0) {
    throw std::invalid_argument("selection fraction must lie in [0, 1]");
  }
  if (params.ring_maxima < 1) throw std::invalid_argument("ring_maxima must be at least 1");
  const auto h = harris_responses(mesh, params, exec);
  const auto nv = mesh.num_vertices();
  std::vector<char> chosen(nv, 0);
  for (Index v : strict_local_maxima(mesh, h, params.ring_maxima)) chosen[v] = 1;

  std::vector<Index> order(nv);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return h[a] > h[b]; });
  const auto top = static_cast<std::size_t>(
      std::ceil(params.selection_fraction * static_cast<double>(nv) - 1e-9));
  for (std::size_t i = 0; i < std::min(top, order.size()); ++i) chosen[order[i]] = 1;

  SamplePointSet out{mesh.id(),
                     params.neighborhood == NeighborhoodType::Rings ? "harris-rings"
                                                                    : "harris-adaptive",
                     {}, {}, false};
  for (Index v = 0; v < nv; ++v) {
    if (chosen[v]) {
      out.indices.push_back(v);
      out.scores.push_back(h[v]);
    }
  }
  out.flagged = out.indices.empty();
  return out;
}

// ---- serialization ----

std::string serialize_points(const SamplePointSet& set) {
  std::ostringstream out;
  out.precision(17);
  out << "# mesh " << set.mesh_id << "\n# method " << set.method << "\n# flagged "
      << (set.flagged ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < set.indices.size(); ++i) {
    out << set.indices[i];
    if (!set.scores.empty()) out << ' ' << set.scores[i];
    out << '\n';
  }
  return out.str();
}

SamplePointSet parse_points(std::string_view text) {
  SamplePointSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool any_score = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ls >> hash >> key;
      std::getline(ls >> std::ws, value);
      if (key == "mesh") set.mesh_id = value;
      else if (key == "method") set.method = value;
      else if (key == "flagged") set.flagged = value == "1";
      continue;
    }
    long long idx = -1;
    if (!(ls >> idx) || idx < 0) throw ParseError("malformed vertex index", line_no);
    set.indices.push_back(static_cast<Index>(idx));
    double score = 0.0;
    if (ls >> score) {
      any_score = true;
      set.scores.push_back(score);
    } else if (any_score) {
      throw ParseError("missing score", line_no);
    }
  }
  if (!set.scores.empty() && set.scores.size() != set.indices.size()) {
    throw ParseError("scores present on some lines only", 0);
  }
  return set;
}

void write_points(const SamplePointSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_points(set);
}

SamplePointSet read_points(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_points(buf.str());
}

}  // namespace shaperet
