#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Geometry>

#include "shaperet/mesh.hpp"

// Parametric test surfaces. All closed surfaces are wound outward.
namespace shaperet::gen {

TriMesh icosphere(double radius, int subdivisions, std::string id = "icosphere");

/// Planar grid in z = 0 with nx x ny quads (each split in two), outward normal +z.
TriMesh grid(int nx, int ny, double spacing, std::string id = "grid");

/// Grid with a Gaussian bump z = height * exp(-r^2 / (2 width^2)) centered
/// on the middle vertex (index returned by `grid_center`).
TriMesh bump_grid(int n, double spacing, double height, double width, std::string id = "bump");
Index grid_center(int nx, int ny);

/// Open tube of given radius along z, `around` segments, `along` rows.
TriMesh cylinder(double radius, double length, int around, int along, std::string id = "cylinder");

TriMesh torus(double major, double minor, int around, int tube, std::string id = "torus");

/// Icosphere scaled per axis.
TriMesh ellipsoid(const Vec3& radii, int subdivisions, std::string id = "ellipsoid");

TriMesh tetrahedron(std::string id = "tetrahedron");

/// Six triangles around vertex 0.
TriMesh fan(int spokes = 6, std::string id = "fan");

TriMesh transformed(const TriMesh& mesh, const Eigen::Affine3d& xf);

/// Displaces each vertex along a uniform random direction by up to `amplitude`.
TriMesh jittered(const TriMesh& mesh, double amplitude, std::uint64_t seed);

}  // namespace shaperet::gen
