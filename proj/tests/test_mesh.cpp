#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shaperet/mesh.hpp"
#include "shaperet/mesh_gen.hpp"

using namespace shaperet;

namespace {

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

std::string error_of(std::string_view text) {
  try {
    parse_off(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parse_off: minimal and closed meshes") {
  const auto tri = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n", "t");
  CHECK(tri.num_vertices() == 3);
  CHECK(tri.num_faces() == 1);
  CHECK(tri.id() == "t");

  const auto tet = parse_off(serialize_off(gen::tetrahedron()));
  CHECK(tet.num_vertices() == 4);
  CHECK(tet.num_faces() == 4);
  for (Index a = 0; a < 4; ++a) {
    for (Index b = a + 1; b < 4; ++b) CHECK(tet.edge_face_count(a, b) == 2);
  }
}

TEST_CASE("parse_off: comments, blank lines and counts on the header line") {
  const auto m = parse_off("# made by hand\nOFF 3 1 0\n\n0 0 0 # a\n1 0 0\n0 1 0\n3 0 1 2\n");
  CHECK(m.num_faces() == 1);
}

TEST_CASE("parse_off: rejections name the line") {
  CHECK(error_of("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 2 3\n").find("non-triangular face") !=
        std::string::npos);
  CHECK(error_of("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 2 3\n").find("line 7") !=
        std::string::npos);
  CHECK(error_of("3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").find("line 1") != std::string::npos);
  CHECK(error_of("OFF\n3 1 0\n0 0 0\n1 0 0\n3 0 1 2\n").find("count mismatch") != std::string::npos);
  CHECK(error_of("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n").find("out of range") != std::string::npos);
  CHECK(error_of("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n").find("degenerate") != std::string::npos);
  CHECK(error_of("COFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").find("unsupported") != std::string::npos);
}

TEST_CASE("OFF round trip is exact") {
  const auto m = gen::jittered(gen::icosphere(1.3, 2), 0.01, 5);
  const auto back = parse_off(serialize_off(m), m.id());
  REQUIRE(back.num_vertices() == m.num_vertices());
  for (Index v = 0; v < m.num_vertices(); ++v) CHECK(back.vertex(v) == m.vertex(v));
  for (Index f = 0; f < m.num_faces(); ++f) CHECK(back.face(f) == m.face(f));
}

TEST_CASE("bbox diagonal") {
  std::vector<Vec3> cube;
  for (int i = 0; i < 8; ++i) cube.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  CHECK(bbox(cube).diagonal() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  const std::vector<Vec3> one{Vec3(2, 3, 4)};
  CHECK(bbox(one).diagonal() == 0.0);
  const std::vector<Vec3> box{Vec3(0, 0, 0), Vec3(3, 4, 12)};
  CHECK(bbox(box).diagonal() == doctest::Approx(13.0).epsilon(1e-15));
  CHECK_THROWS(bbox(std::span<const Vec3>{}));

  const auto m = gen::torus(1, 0.3, 24, 12);
  const double d = bbox(m).diagonal();
  Eigen::Affine3d shift(Eigen::Translation3d(5, -2, 7));
  CHECK(bbox(gen::transformed(m, shift)).diagonal() == doctest::Approx(d).epsilon(1e-12));
  Eigen::Affine3d scale(Eigen::Scaling(3.0));
  CHECK(bbox(gen::transformed(m, scale)).diagonal() == doctest::Approx(3 * d).epsilon(1e-12));
}

TEST_CASE("vertex_rings") {
  const auto tet = gen::tetrahedron();
  for (Index v = 0; v < 4; ++v) {
    auto r = vertex_rings(tet, v, 1);
    CHECK(r.size() == 3);
    CHECK(std::find(r.begin(), r.end(), v) == r.end());
  }
  CHECK(vertex_rings(tet, 0, 0).empty());
  CHECK_THROWS(vertex_rings(tet, 9, 1));

  const auto fan = gen::fan(6);
  CHECK(vertex_rings(fan, 0, 1) == std::vector<Index>{1, 2, 3, 4, 5, 6});

  const auto s = gen::icosphere(1, 2);
  for (Index v : {0u, 17u, 100u}) {
    for (int k = 0; k < 4; ++k) {
      const auto a = vertex_rings(s, v, k), b = vertex_rings(s, v, k + 1);
      CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
  }
}

TEST_CASE("curvature on analytic surfaces") {
  SUBCASE("icosphere radius 2") {
    const auto s = gen::icosphere(2.0, 4);
    const auto g = estimate_geometry(s);
    std::vector<double> h, k;
    for (Index v = 0; v < s.num_vertices(); ++v) {
      h.push_back(g.mean(v));
      k.push_back(g.gauss(v));
      CHECK(g.kappa1[v] >= g.kappa2[v]);
      CHECK(std::abs(g.normals[v].norm() - 1.0) < 1e-6);
      CHECK(g.normals[v].dot(s.vertex(v).normalized()) > 0.99);
    }
    CHECK(std::abs(median(h) - 0.5) <= 0.05 * 0.5);
    CHECK(std::abs(median(k) - 0.25) <= 0.10 * 0.25);
  }
  SUBCASE("flat grid") {
    const double spacing = 0.1;
    const auto m = gen::grid(12, 12, spacing);
    const auto g = estimate_geometry(m);
    for (Index v = 0; v < m.num_vertices(); ++v) {
      CHECK(std::abs(g.kappa1[v]) <= 1e-6 / spacing);
      CHECK(std::abs(g.kappa2[v]) <= 1e-6 / spacing);
    }
  }
  SUBCASE("cylinder side") {
    const auto c = gen::cylinder(1.5, 6.0, 64, 48);
    const auto g = estimate_geometry(c);
    int checked = 0;
    for (Index v = 0; v < c.num_vertices(); ++v) {
      if (std::abs(c.vertex(v).z()) > 1.5) continue;  // stay away from the open ends
      CHECK(std::abs(g.kappa1[v] - 1 / 1.5) <= 0.1 / 1.5);
      CHECK(std::abs(g.kappa2[v]) <= 0.1 / 1.5);
      ++checked;
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("curvature is rotation-equivariant") {
  const auto m = gen::jittered(gen::ellipsoid(Vec3(1.5, 1, 0.7), 3), 0.003, 11);
  const Eigen::Affine3d xf(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()));
  const auto r = gen::transformed(m, xf);
  const auto a = estimate_geometry(m), b = estimate_geometry(r);
  for (Index v = 0; v < m.num_vertices(); ++v) {
    const double scale = std::max(1.0, std::abs(a.kappa1[v]));
    CHECK(std::abs(a.kappa1[v] - b.kappa1[v]) <= 1e-6 * scale);
    CHECK(std::abs(a.kappa2[v] - b.kappa2[v]) <= 1e-6 * scale);
  }
}

TEST_CASE("isolated vertex gets zero curvature and low quality") {
  const TriMesh m("iso", {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(5, 5, 5)}, {{0, 1, 2}});
  const auto g = estimate_geometry(m);
  CHECK(g.kappa1[3] == 0.0);
  CHECK(g.kappa2[3] == 0.0);
  CHECK(g.quality[3] == 0);
}

TEST_CASE("serial and parallel geometry agree bit for bit") {
  const auto m = gen::jittered(gen::torus(1, 0.4, 40, 20), 0.005, 3);
  const auto a = estimate_geometry(m, Exec::Serial);
  ThreadCountGuard guard(4);
  const auto b = estimate_geometry(m, Exec::Parallel);
  CHECK(a.kappa1 == b.kappa1);
  CHECK(a.kappa2 == b.kappa2);
}

TEST_CASE("decimation") {
  const auto s = gen::icosphere(1, 4);
  const auto same = decimate(s, 0.0);
  CHECK(same.mesh.num_vertices() == s.num_vertices());
  CHECK(same.mesh.num_faces() == s.num_faces());
  CHECK_FALSE(same.exhausted);

  const auto d = decimate(s, 0.2);
  const double target = 2562 * 0.8;
  CHECK(std::abs(static_cast<double>(d.mesh.num_vertices()) - target) <= 0.02 * target);
  REQUIRE(d.to_original.size() == d.mesh.num_vertices());
  for (Index v = 0; v < d.mesh.num_vertices(); ++v) {
    CHECK(d.mesh.vertex(v) == s.vertex(d.to_original[v]));
  }
  // Still a closed manifold: every edge has two faces.
  for (Index f = 0; f < d.mesh.num_faces(); ++f) {
    const auto& t = d.mesh.face(f);
    for (int e = 0; e < 3; ++e) CHECK(d.mesh.edge_face_count(t[e], t[(e + 1) % 3]) == 2);
  }

  CHECK(decimate(gen::tetrahedron(), 0.5).exhausted);
  CHECK_THROWS_AS(decimate(s, 1.0), MeshError);
  CHECK_THROWS_AS(decimate(s, -0.1), MeshError);
}
