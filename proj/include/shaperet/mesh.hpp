#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "shaperet/exec.hpp"

namespace shaperet {

using Vec3 = Eigen::Vector3d;
using Index = std::uint32_t;
using Face = std::array<Index, 3>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure; `line()` is 1-based, 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

  /// Same error with `context` (e.g. a file path) prepended to the message.
  ParseError with_context(const std::string& context) const {
    return ParseError(Prefixed{}, context + ": " + what(), line_);
  }

 private:
  struct Prefixed {};
  ParseError(Prefixed, const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line_;
};

struct BBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  double diagonal() const { return (max - min).norm(); }
};

/// Indexed triangle surface. Immutable after construction; the constructor
/// validates indices and builds vertex/face adjacency.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(std::string id, std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::string& id() const noexcept { return id_; }
  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_faces() const noexcept { return faces_.size(); }

  std::span<const Vec3> vertices() const noexcept { return vertices_; }
  const Vec3& vertex(Index v) const { return vertices_[v]; }
  std::span<const Face> faces() const noexcept { return faces_; }
  const Face& face(Index f) const { return faces_[f]; }

  /// 1-ring vertex neighbors of `v`, ascending.
  std::span<const Index> neighbors(Index v) const {
    return {nbr_.data() + nbr_offset_[v], nbr_.data() + nbr_offset_[v + 1]};
  }
  /// Faces incident to `v`, ascending.
  std::span<const Index> incident_faces(Index v) const {
    return {vf_.data() + vf_offset_[v], vf_.data() + vf_offset_[v + 1]};
  }

  /// Number of faces sharing the undirected edge (a, b); 0 if not an edge.
  int edge_face_count(Index a, Index b) const;

 private:
  std::string id_;
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<std::size_t> nbr_offset_, vf_offset_;
  std::vector<Index> nbr_, vf_;
};

BBox bbox(const TriMesh& mesh);
BBox bbox(std::span<const Vec3> points);

/// Vertices within `k` edge hops of `v`, excluding `v`; ascending. k = 0 gives {}.
std::vector<Index> vertex_rings(const TriMesh& mesh, Index v, int k);

/// BFS layers around `v`: layers[0] = {v}, layers[j] = vertices exactly j hops away.
/// Stops early when a layer is empty.
std::vector<std::vector<Index>> ring_layers(const TriMesh& mesh, Index v, int k);

// ASCII OFF.
TriMesh parse_off(std::string_view text, std::string id = {});
TriMesh read_off(const std::filesystem::path& path);
std::string serialize_off(const TriMesh& mesh);
void write_off(const TriMesh& mesh, const std::filesystem::path& path);

/// Per-vertex normals and principal curvatures (kappa1 >= kappa2).
struct VertexGeometry {
  std::vector<Vec3> normals;
  std::vector<double> kappa1;
  std::vector<double> kappa2;
  /// 1 when the curvature fit was well-posed; 0 for isolated or underdetermined vertices.
  std::vector<std::uint8_t> quality;

  double mean(Index v) const { return 0.5 * (kappa1[v] + kappa2[v]); }
  double gauss(Index v) const { return kappa1[v] * kappa2[v]; }
};

/// Area-weighted normals and quadratic-patch curvatures over the 2-ring.
/// Curvature sign follows face winding: positive on convex regions of an
/// outward-wound surface.
VertexGeometry estimate_geometry(const TriMesh& mesh, Exec exec = Exec::Parallel);

struct Decimation {
  TriMesh mesh;
  /// to_original[i] = index in the source mesh of decimated vertex i.
  std::vector<Index> to_original;
  /// Set when no admissible collapse remained before reaching the target.
  bool exhausted = false;
};

/// Shortest-edge half-collapse simplification removing about
/// `fraction_removed` of the vertices. Surviving vertices keep their
/// original positions.
Decimation decimate(const TriMesh& mesh, double fraction_removed);

}  // namespace shaperet
