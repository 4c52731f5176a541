#include "shaperet/mesh_gen.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "shaperet/random.hpp"

namespace shaperet::gen {

namespace {

using std::numbers::pi;

Index midpoint(std::map<std::pair<Index, Index>, Index>& cache, std::vector<Vec3>& verts,
               Index a, Index b) {
  const auto key = std::minmax(a, b);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  verts.push_back(((verts[a] + verts[b]) * 0.5).normalized());
  const auto idx = static_cast<Index>(verts.size() - 1);
  cache.emplace(key, idx);
  return idx;
}

void unit_icosphere(int subdivisions, std::vector<Vec3>& verts, std::vector<Face>& faces) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  verts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
           {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
           {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<Index, Index>, Index> cache;
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const Index a = midpoint(cache, verts, f[0], f[1]);
      const Index b = midpoint(cache, verts, f[1], f[2]);
      const Index c = midpoint(cache, verts, f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces.swap(next);
  }
}

// Faces for an (nu x nv) vertex lattice; wraps in u and/or v when requested.
std::vector<Face> lattice_faces(int nu, int nv, bool wrap_u, bool wrap_v) {
  std::vector<Face> faces;
  const int cu = wrap_u ? nu : nu - 1;
  const int cv = wrap_v ? nv : nv - 1;
  auto id = [&](int i, int j) { return static_cast<Index>((i % nu) * nv + (j % nv)); };
  for (int i = 0; i < cu; ++i) {
    for (int j = 0; j < cv; ++j) {
      const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      faces.push_back({a, b, c});
      faces.push_back({a, c, d});
    }
  }
  return faces;
}

}  // namespace

TriMesh icosphere(double radius, int subdivisions, std::string id) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  unit_icosphere(subdivisions, verts, faces);
  for (auto& v : verts) v *= radius;
  return TriMesh(std::move(id), std::move(verts), std::move(faces));
}

TriMesh ellipsoid(const Vec3& radii, int subdivisions, std::string id) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  unit_icosphere(subdivisions, verts, faces);
  for (auto& v : verts) v = v.cwiseProduct(radii);
  return TriMesh(std::move(id), std::move(verts), std::move(faces));
}

TriMesh grid(int nx, int ny, double spacing, std::string id) {
  std::vector<Vec3> verts;
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) verts.emplace_back(i * spacing, j * spacing, 0.0);
  }
  return TriMesh(std::move(id), std::move(verts), lattice_faces(nx + 1, ny + 1, false, false));
}

Index grid_center(int nx, int ny) { return static_cast<Index>((nx / 2) * (ny + 1) + ny / 2); }

TriMesh bump_grid(int n, double spacing, double height, double width, std::string id) {
  const auto flat = grid(n, n, spacing);
  const Vec3 c = flat.vertex(grid_center(n, n));
  std::vector<Vec3> verts(flat.vertices().begin(), flat.vertices().end());
  for (auto& v : verts) {
    const double r2 = (v - c).squaredNorm();
    v.z() = height * std::exp(-r2 / (2.0 * width * width));
  }
  return TriMesh(std::move(id), std::move(verts),
                 std::vector<Face>(flat.faces().begin(), flat.faces().end()));
}

TriMesh cylinder(double radius, double length, int around, int along, std::string id) {
  std::vector<Vec3> verts;
  for (int i = 0; i < around; ++i) {
    const double a = 2.0 * pi * i / around;
    for (int j = 0; j <= along; ++j) {
      verts.emplace_back(radius * std::cos(a), radius * std::sin(a), length * j / along);
    }
  }
  return TriMesh(std::move(id), std::move(verts), lattice_faces(around, along + 1, true, false));
}

TriMesh torus(double major, double minor, int around, int tube, std::string id) {
  std::vector<Vec3> verts;
  for (int i = 0; i < around; ++i) {
    const double u = 2.0 * pi * i / around;
    for (int j = 0; j < tube; ++j) {
      const double v = 2.0 * pi * j / tube;
      const double r = major + minor * std::cos(v);
      verts.emplace_back(r * std::cos(u), r * std::sin(u), minor * std::sin(v));
    }
  }
  return TriMesh(std::move(id), std::move(verts), lattice_faces(around, tube, true, true));
}

TriMesh tetrahedron(std::string id) {
  std::vector<Vec3> verts{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  std::vector<Face> faces{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return TriMesh(std::move(id), std::move(verts), std::move(faces));
}

TriMesh fan(int spokes, std::string id) {
  std::vector<Vec3> verts{Vec3::Zero()};
  std::vector<Face> faces;
  for (int i = 0; i < spokes; ++i) {
    const double a = 2.0 * pi * i / spokes;
    verts.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  for (int i = 0; i < spokes; ++i) {
    faces.push_back({0, static_cast<Index>(1 + i), static_cast<Index>(1 + (i + 1) % spokes)});
  }
  return TriMesh(std::move(id), std::move(verts), std::move(faces));
}

TriMesh transformed(const TriMesh& mesh, const Eigen::Affine3d& xf) {
  std::vector<Vec3> verts;
  verts.reserve(mesh.num_vertices());
  for (const auto& v : mesh.vertices()) verts.push_back(xf * v);
  return TriMesh(mesh.id(), std::move(verts),
                 std::vector<Face>(mesh.faces().begin(), mesh.faces().end()));
}

TriMesh jittered(const TriMesh& mesh, double amplitude, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> verts(mesh.vertices().begin(), mesh.vertices().end());
  for (auto& v : verts) {
    const Vec3 dir = rng.unit_vector();
    v += amplitude * rng.uniform() * dir;
  }
  return TriMesh(mesh.id(), std::move(verts),
                 std::vector<Face>(mesh.faces().begin(), mesh.faces().end()));
}

}  // namespace shaperet::gen
