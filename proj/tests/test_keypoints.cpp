#include <doctest.h>

#include <algorithm>
#include <set>

#include "shaperet/keypoints.hpp"
#include "shaperet/mesh_gen.hpp"

using namespace shaperet;

namespace {

bool contains(const SamplePointSet& s, Index v) {
  return std::find(s.indices.begin(), s.indices.end(), v) != s.indices.end();
}

void check_valid(const SamplePointSet& s, const TriMesh& m) {
  const std::set<Index> unique(s.indices.begin(), s.indices.end());
  CHECK(unique.size() == s.indices.size());
  for (Index v : s.indices) CHECK(v < m.num_vertices());
  CHECK((s.scores.empty() || s.scores.size() == s.indices.size()));
}

const TriMesh& bump() {
  static const TriMesh m = gen::bump_grid(40, 0.05, 0.4, 0.2);
  return m;
}
const Index kApex = gen::grid_center(40, 40);

const TriMesh& sphere() {
  static const TriMesh m = gen::icosphere(2.0, 4);
  return m;
}

}  // namespace

TEST_CASE("random points") {
  const auto m = gen::icosphere(1, 2);
  const auto n = m.num_vertices();
  const auto all = random_points(m, n, 3);
  CHECK(all.indices.size() == n);
  std::set<Index> seen(all.indices.begin(), all.indices.end());
  CHECK(seen.size() == n);
  CHECK(random_points(m, 50, 9).indices == random_points(m, 50, 9).indices);
  CHECK(random_points(m, 50, 9).indices != random_points(m, 50, 10).indices);
  // A prefix of a longer draw: both use the same shuffle.
  const auto a = random_points(m, 20, 4), b = random_points(m, 60, 4);
  CHECK(std::equal(a.indices.begin(), a.indices.end(), b.indices.begin()));
  check_valid(b, m);
  CHECK_THROWS(random_points(m, n + 1, 1));
  CHECK_THROWS(random_points(m, 0, 1));
}

TEST_CASE("gaussian average of a constant is the constant") {
  const auto m = gen::jittered(gen::icosphere(1, 3), 0.01, 2);
  const std::vector<double> c(m.num_vertices(), 3.25);
  for (double x : gaussian_average(m, c, 0.05)) CHECK(x == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("mesh saliency") {
  SUBCASE("sphere: nothing salient") {
    const auto g = estimate_geometry(sphere());
    const auto s = mesh_saliency(sphere(), g);
    CHECK((s.indices.empty() || s.flagged));
    check_valid(s, sphere());
  }
  SUBCASE("bump: apex found") {
    const auto g = estimate_geometry(bump());
    const auto field = mesh_saliency_field(bump(), g);
    CHECK(field.scale_maps.size() == 5);
    for (const auto& map : field.scale_maps) CHECK(*std::min_element(map.begin(), map.end()) >= 0.0);
    CHECK(*std::min_element(field.combined.begin(), field.combined.end()) >= 0.0);
    const auto s = mesh_saliency(bump(), g);
    CHECK_FALSE(s.flagged);
    CHECK(contains(s, kApex));
    check_valid(s, bump());
  }
}

TEST_CASE("suppression promotes a single peak") {
  const auto m = gen::grid(10, 10, 1.0);
  std::vector<double> one(m.num_vertices(), 0.0), many(m.num_vertices(), 0.0);
  one[gen::grid_center(10, 10)] = 1.0;
  const auto s1 = suppress(m, one);
  CHECK(*std::max_element(s1.begin(), s1.end()) == doctest::Approx(1.0));
  for (Index v : {12u, 45u, 78u}) many[v] = 1.0;
  const auto s2 = suppress(m, many);
  CHECK(*std::max_element(s2.begin(), s2.end()) == 0.0);  // equal peaks cancel
  many[45] = 0.4;
  const auto s3 = suppress(m, many);
  CHECK(s3[12] == doctest::Approx(0.09).epsilon(1e-12));  // other maxima {0.4, 1}: (1 - 0.7)^2
}

TEST_CASE("inhibition keeps only values above the neighborhood percentile") {
  const auto m = gen::jittered(gen::icosphere(1, 3), 0.01, 6);
  std::vector<double> map(m.num_vertices());
  for (Index v = 0; v < m.num_vertices(); ++v) map[v] = std::sin(7.0 * v) + 1.0;
  const auto kept = inhibit(m, map, 0.85, 2);
  for (Index v = 0; v < m.num_vertices(); ++v) {
    auto nb = vertex_rings(m, v, 2);
    nb.push_back(v);
    std::vector<double> vals;
    for (Index u : nb) vals.push_back(map[u]);
    std::sort(vals.begin(), vals.end());
    const double pos = 0.85 * (vals.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double pct = vals[lo] + (pos - lo) * (vals[std::min(lo + 1, vals.size() - 1)] - vals[lo]);
    CHECK(kept[v] == (map[v] > pct ? map[v] : 0.0));
  }
}

TEST_CASE("salient points (multi-level)") {
  const CastellaniParams p;
  CHECK(p.decimation_levels == std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8});
  CHECK(p.min_levels == 3);
  const auto s = castellani_points(sphere());
  CHECK(s.indices.size() <= 5);
  const auto b = castellani_points(bump());
  CHECK(contains(b, kApex));
  check_valid(b, bump());
}

TEST_CASE("harris response arithmetic") {
  CHECK(harris_response(Eigen::Matrix2d::Identity(), 0.04) == doctest::Approx(0.84).epsilon(1e-15));
  Eigen::Matrix2d e;
  e << 2, 1, 1, 3;
  CHECK(harris_response(e, 0.01) == doctest::Approx(5 - 0.01 * 25).epsilon(1e-15));
}

TEST_CASE("harris presets") {
  const auto a = HarrisParams::adaptive();
  CHECK(a.neighborhood == NeighborhoodType::Adaptive);
  CHECK(a.k == 0.04);
  CHECK(a.selection_fraction == 0.01);
  const auto r = HarrisParams::rings();
  CHECK(r.neighborhood == NeighborhoodType::Rings);
  CHECK(r.neighborhood_param == 1);
  CHECK(r.selection_fraction == 0.05);
}

TEST_CASE("harris on a flat grid is zero") {
  const auto m = gen::grid(20, 20, 0.1);
  for (const auto& p : {HarrisParams::adaptive(), HarrisParams::rings()}) {
    const auto h = harris_responses(m, p);
    for (int y = 3; y < 18; ++y) {
      for (int x = 3; x < 18; ++x) CHECK(std::abs(h[y * 21 + x]) < 1e-12);
    }
  }
}

TEST_CASE("harris selection size and apex") {
  const auto m = gen::jittered(gen::torus(1, 0.4, 40, 25), 0.004, 1);  // 1000 vertices
  REQUIRE(m.num_vertices() == 1000);
  const auto r = harris3d(m, HarrisParams::rings());
  CHECK(r.indices.size() >= 50);
  CHECK(r.method == "harris-rings");
  check_valid(r, m);
  const auto s = harris3d(sphere(), HarrisParams::rings());
  CHECK(s.indices.size() >= static_cast<std::size_t>(0.05 * sphere().num_vertices()));
  const auto a = harris3d(bump(), HarrisParams::adaptive());
  CHECK(contains(a, kApex));
}

TEST_CASE("harris responses are rigid-motion invariant") {
  const auto m = gen::jittered(gen::ellipsoid(Vec3(1.3, 1, 0.8), 3), 0.003, 12);
  const Eigen::Affine3d xf = Eigen::Translation3d(3, 1, -2) * Eigen::AngleAxisd(2.0, Vec3(0, 1, 1).normalized());
  const auto r = gen::transformed(m, xf);
  auto p = HarrisParams::rings();
  const auto a = harris_responses(m, p), b = harris_responses(r, p);
  double scale = 0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  for (Index v = 0; v < m.num_vertices(); ++v) CHECK(std::abs(a[v] - b[v]) <= 1e-6 * scale);
}

TEST_CASE("detectors: serial and parallel agree") {
  const auto g = estimate_geometry(bump());
  ThreadCountGuard guard(4);
  CHECK(mesh_saliency(bump(), g, {}, Exec::Serial).indices == mesh_saliency(bump(), g, {}, Exec::Parallel).indices);
  const auto p = HarrisParams::adaptive();
  CHECK(harris_responses(bump(), p, Exec::Serial) == harris_responses(bump(), p, Exec::Parallel));
}

TEST_CASE("point set text round trip") {
  SamplePointSet s{"cow_01", "harris-rings", {4, 17, 2}, {0.5, 1.0 / 3.0, -2e-17}, false};
  const auto back = parse_points(serialize_points(s));
  CHECK(back.mesh_id == s.mesh_id);
  CHECK(back.method == s.method);
  CHECK(back.indices == s.indices);
  CHECK(back.scores == s.scores);
  CHECK(back.flagged == s.flagged);
  SamplePointSet empty{"x", "mesh-saliency", {}, {}, true};
  CHECK(parse_points(serialize_points(empty)).flagged);
}
