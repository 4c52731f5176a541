#include "shaperet/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace shaperet {

namespace {

void build_csr(std::vector<std::vector<Index>>& lists, std::vector<std::size_t>& offsets,
               std::vector<Index>& flat) {
  offsets.assign(lists.size() + 1, 0);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    auto& l = lists[i];
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    offsets[i + 1] = offsets[i] + l.size();
  }
  flat.clear();
  flat.reserve(offsets.back());
  for (const auto& l : lists) flat.insert(flat.end(), l.begin(), l.end());
}

}  // namespace

TriMesh::TriMesh(std::string id, std::vector<Vec3> vertices, std::vector<Face> faces)
    : id_(std::move(id)), vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const auto nv = vertices_.size();
  for (std::size_t i = 0; i < nv; ++i) {
    if (!vertices_[i].allFinite()) {
      throw MeshError("vertex " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
  std::vector<std::vector<Index>> nbr(nv), vf(nv);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& t = faces_[f];
    for (Index idx : t) {
      if (idx >= nv) {
        throw MeshError("face " + std::to_string(f) + " references vertex " +
                        std::to_string(idx) + " but only " + std::to_string(nv) +
                        " vertices exist");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshError("face " + std::to_string(f) + " is degenerate");
    }
    for (int k = 0; k < 3; ++k) {
      const Index a = t[k], b = t[(k + 1) % 3];
      nbr[a].push_back(b);
      nbr[b].push_back(a);
      vf[a].push_back(static_cast<Index>(f));
    }
  }
  build_csr(nbr, nbr_offset_, nbr_);
  build_csr(vf, vf_offset_, vf_);
}

int TriMesh::edge_face_count(Index a, Index b) const {
  int count = 0;
  for (Index f : incident_faces(a)) {
    const auto& t = faces_[f];
    if (t[0] == b || t[1] == b || t[2] == b) ++count;
  }
  return count;
}

BBox bbox(std::span<const Vec3> points) {
  if (points.empty()) throw MeshError("bounding box of an empty vertex set");
  BBox box{points[0], points[0]};
  for (const auto& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

BBox bbox(const TriMesh& mesh) { return bbox(mesh.vertices()); }

std::vector<std::vector<Index>> ring_layers(const TriMesh& mesh, Index v, int k) {
  if (v >= mesh.num_vertices()) {
    throw MeshError("vertex " + std::to_string(v) + " out of range");
  }
  if (k < 0) throw MeshError("ring count must be non-negative");
  std::vector<std::vector<Index>> layers{{v}};
  // Small k on large meshes: a sorted visited list beats a V-sized bitmap.
  std::vector<Index> visited{v};
  for (int depth = 1; depth <= k; ++depth) {
    std::vector<Index> next;
    for (Index u : layers.back()) {
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
    layers.push_back(std::move(fresh));
  }
  return layers;
}

std::vector<Index> vertex_rings(const TriMesh& mesh, Index v, int k) {
  auto layers = ring_layers(mesh, v, k);
  std::vector<Index> out;
  for (std::size_t j = 1; j < layers.size(); ++j) {
    out.insert(out.end(), layers[j].begin(), layers[j].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace shaperet
