#include <cmath>

#include <Eigen/Dense>

#include "shaperet/mesh.hpp"

namespace shaperet {

namespace {

// Any unit vector orthogonal to n.
Vec3 orthogonal_unit(const Vec3& n) {
  const Vec3 axis = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return (axis - axis.dot(n) * n).normalized();
}

struct Curvature {
  double k1 = 0.0, k2 = 0.0;
  bool ok = false;
};

// Fits z = a x^2 + b xy + c y^2 in the tangent frame of `n`; the principal
// curvatures are the negated eigenvalues of the Hessian [[2a, b], [b, 2c]].
Curvature fit_patch(const TriMesh& mesh, Index v, const Vec3& n) {
  const auto nbrs = vertex_rings(mesh, v, 2);
  if (nbrs.size() < 3) return {};
  const Vec3 u = orthogonal_unit(n);
  const Vec3 w = n.cross(u);
  const Vec3& p = mesh.vertex(v);

  // Scale local coordinates by the mean neighbor distance for conditioning.
  double h = 0.0;
  for (Index q : nbrs) h += (mesh.vertex(q) - p).norm();
  h /= static_cast<double>(nbrs.size());
  if (!(h > 0.0)) return {};

  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (Index q : nbrs) {
    const Vec3 d = (mesh.vertex(q) - p) / h;
    const double x = d.dot(u), y = d.dot(w), z = d.dot(n);
    const Eigen::Vector3d row(x * x, x * y, y * y);
    ata.noalias() += row * row.transpose();
    atb.noalias() += row * z;
  }
  Eigen::LDLT<Eigen::Matrix3d> ldlt(ata);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12) return {};
  const Eigen::Vector3d coef = ldlt.solve(atb) / h;  // undo the coordinate scaling

  const double a = coef[0], b = coef[1], c = coef[2];
  // Eigenvalues of [[2a, b], [b, 2c]], closed form.
  const double mean = a + c;
  const double disc = std::sqrt((a - c) * (a - c) + b * b);
  Curvature out;
  out.k1 = -(mean - disc);
  out.k2 = -(mean + disc);
  out.ok = std::isfinite(out.k1) && std::isfinite(out.k2);
  if (!out.ok) return {};
  return out;
}

}  // namespace

VertexGeometry estimate_geometry(const TriMesh& mesh, Exec exec) {
  const auto nv = mesh.num_vertices();
  VertexGeometry g;
  g.normals.assign(nv, Vec3::UnitZ());
  g.kappa1.assign(nv, 0.0);
  g.kappa2.assign(nv, 0.0);
  g.quality.assign(nv, 0);

  parallel_for(nv, exec, [&](std::size_t i) {
    const auto v = static_cast<Index>(i);
    Vec3 acc = Vec3::Zero();
    // Cross product length is twice the face area, so this is area-weighted.
    for (Index f : mesh.incident_faces(v)) {
      const auto& t = mesh.face(f);
      acc += (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(mesh.vertex(t[2]) - mesh.vertex(t[0]));
    }
    const double len = acc.norm();
    if (!(len > 0.0)) return;  // isolated or zero-area fan: keep +z, quality 0
    const Vec3 n = acc / len;
    g.normals[i] = n;
    const auto c = fit_patch(mesh, v, n);
    if (!c.ok) return;
    g.kappa1[i] = c.k1;
    g.kappa2[i] = c.k2;
    g.quality[i] = 1;
  });
  return g;
}

}  // namespace shaperet
