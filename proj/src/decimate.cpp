#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "shaperet/mesh.hpp"

namespace shaperet {

namespace {

class Collapser {
 public:
  explicit Collapser(const TriMesh& mesh)
      : pos_(mesh.vertices().begin(), mesh.vertices().end()),
        faces_(mesh.faces().begin(), mesh.faces().end()),
        face_alive_(mesh.num_faces(), 1),
        vertex_alive_(mesh.num_vertices(), 1),
        vf_(mesh.num_vertices()) {
    for (Index f = 0; f < faces_.size(); ++f) {
      for (Index v : faces_[f]) vf_[v].push_back(f);
    }
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
      for (Index w : mesh.neighbors(v)) {
        if (v < w) push_edge(v, w);
      }
    }
  }

  std::size_t run(std::size_t target, std::size_t alive) {
    while (alive > target && !queue_.empty()) {
      const auto [len, a, b] = queue_.top();
      queue_.pop();
      if (!vertex_alive_[a] || !vertex_alive_[b] || shared_faces(a, b).empty()) continue;
      if (try_collapse(b, a) || try_collapse(a, b)) --alive;
    }
    return alive;
  }

  Decimation finish(const std::string& id, bool exhausted) const {
    Decimation out;
    std::vector<Index> remap(pos_.size(), static_cast<Index>(-1));
    std::vector<Vec3> verts;
    for (Index v = 0; v < pos_.size(); ++v) {
      if (!vertex_alive_[v]) continue;
      remap[v] = static_cast<Index>(verts.size());
      verts.push_back(pos_[v]);
      out.to_original.push_back(v);
    }
    std::vector<Face> faces;
    for (Index f = 0; f < faces_.size(); ++f) {
      if (!face_alive_[f]) continue;
      const auto& t = faces_[f];
      faces.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    }
    out.mesh = TriMesh(id, std::move(verts), std::move(faces));
    out.exhausted = exhausted;
    return out;
  }

 private:
  using Entry = std::tuple<double, Index, Index>;

  void push_edge(Index a, Index b) {
    if (a > b) std::swap(a, b);
    queue_.emplace((pos_[a] - pos_[b]).norm(), a, b);
  }

  static bool contains(const Face& t, Index v) { return t[0] == v || t[1] == v || t[2] == v; }

  std::vector<Index> shared_faces(Index a, Index b) const {
    std::vector<Index> out;
    for (Index f : vf_[a]) {
      if (contains(faces_[f], b)) out.push_back(f);
    }
    return out;
  }

  std::vector<Index> link(Index v) const {
    std::vector<Index> out;
    for (Index f : vf_[v]) {
      for (Index w : faces_[f]) {
        if (w != v) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool is_boundary(Index v) const {
    for (Index w : link(v)) {
      if (shared_faces(v, w).size() == 1) return true;
    }
    return false;
  }

  Vec3 face_normal(const Face& t) const {
    return (pos_[t[1]] - pos_[t[0]]).cross(pos_[t[2]] - pos_[t[0]]);
  }

  // Removes `from`, reattaching its faces to `to`. Returns false and leaves
  // the mesh untouched when the collapse would break manifoldness or flip a face.
  bool try_collapse(Index from, Index to) {
    const auto shared = shared_faces(from, to);
    std::vector<Index> opposite;
    for (Index f : shared) {
      for (Index w : faces_[f]) {
        if (w != from && w != to) opposite.push_back(w);
      }
    }
    std::sort(opposite.begin(), opposite.end());
    const auto lf = link(from), lt = link(to);
    std::vector<Index> common;
    std::set_intersection(lf.begin(), lf.end(), lt.begin(), lt.end(), std::back_inserter(common));
    if (common != opposite) return false;
    if (shared.size() == 2 && is_boundary(from) && is_boundary(to)) return false;

    for (Index f : vf_[from]) {
      if (contains(faces_[f], to)) continue;
      Face moved = faces_[f];
      for (auto& w : moved) {
        if (w == from) w = to;
      }
      // The reattached face must not duplicate an existing one.
      auto sorted = moved;
      std::sort(sorted.begin(), sorted.end());
      for (Index g : vf_[to]) {
        auto other = faces_[g];
        std::sort(other.begin(), other.end());
        if (other == sorted) return false;
      }
      const Vec3 before = face_normal(faces_[f]);
      const Vec3 after = face_normal(moved);
      if (after.norm() <= 1e-12 * before.norm() || after.dot(before) <= 0.0) return false;
    }

    for (Index f : shared) {
      face_alive_[f] = 0;
      for (Index w : faces_[f]) {
        if (w != from) std::erase(vf_[w], f);
      }
    }
    for (Index f : vf_[from]) {
      if (!face_alive_[f]) continue;
      for (auto& w : faces_[f]) {
        if (w == from) w = to;
      }
      vf_[to].push_back(f);
    }
    vf_[from].clear();
    vertex_alive_[from] = 0;
    for (Index w : link(to)) push_edge(to, w);
    return true;
  }

  std::vector<Vec3> pos_;
  std::vector<Face> faces_;
  std::vector<std::uint8_t> face_alive_;
  std::vector<std::uint8_t> vertex_alive_;
  std::vector<std::vector<Index>> vf_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
};

}  // namespace

Decimation decimate(const TriMesh& mesh, double fraction_removed) {
  if (!(fraction_removed >= 0.0) || fraction_removed >= 1.0) {
    throw MeshError("decimation fraction must lie in [0, 1)");
  }
  const auto nv = mesh.num_vertices();
  const auto target =
      static_cast<std::size_t>(std::llround((1.0 - fraction_removed) * static_cast<double>(nv)));
  if (target >= nv) {
    Decimation out{mesh, {}, false};
    out.to_original.resize(nv);
    for (Index v = 0; v < nv; ++v) out.to_original[v] = v;
    return out;
  }
  Collapser collapser(mesh);
  const auto alive = collapser.run(target, nv);
  return collapser.finish(mesh.id(), alive > target);
}

}  // namespace shaperet
