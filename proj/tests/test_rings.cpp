#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "shaperet/mesh_gen.hpp"
#include "shaperet/ring_sampler.hpp"

using namespace shaperet;
constexpr double kPi = std::numbers::pi;

namespace {

// Closed polyline sampled from an exact circle in the xy plane.
Polyline circle(double r, int n, double phase = 0.0) {
  Polyline p;
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2 * kPi * i / n;
    SurfacePoint s;
    s.pos = Vec3(r * std::cos(t), r * std::sin(t), 0);
    s.weights[0] = 1;
    p.points.push_back(s);
  }
  return p;
}

}  // namespace

TEST_CASE("ring radii") {
  const auto r = ring_radii(1.0, 5);
  const double want[] = {0.0075, 0.0150, 0.0225, 0.0300, 0.0375};
  REQUIRE(r.size() == 5);
  for (int j = 0; j < 5; ++j) CHECK(r[j] == doctest::Approx(want[j]).epsilon(1e-14));
  CHECK(ring_radii(std::sqrt(3.0), 5)[0] == doctest::Approx(0.0129904).epsilon(1e-6));
  CHECK(ring_radii(2.0, 1) == std::vector<double>{0.075});
  CHECK_THROWS(ring_radii(0.0, 5));
  CHECK_THROWS(ring_radii(-1.0, 5));
}

TEST_CASE("extract_ring on a plane") {
  const auto m = gen::grid(40, 40, 0.02);
  const Index c = gen::grid_center(40, 40);
  const auto ring = extract_ring(m, c, Vec3::UnitZ(), 0.1);
  REQUIRE(ring.has_value());
  CHECK(ring->closed);
  CHECK(std::abs(ring->length() - 2 * kPi * 0.1) <= 0.01 * 2 * kPi * 0.1);
  for (const auto& p : ring->points) {
    CHECK(std::abs((p.pos - m.vertex(c)).norm() - 0.1) < 1e-9 * 0.1);
    // Interpolation weights reproduce the point (it lies on the surface).
    const Vec3 back = p.interpolate<Vec3>(m.vertices());
    CHECK((back - p.pos).norm() < 1e-9);
  }
  // Counterclockwise about +z: positive signed area.
  double area = 0;
  const auto& pts = ring->points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i].pos;
    const auto& b = pts[(i + 1) % pts.size()].pos;
    area += a.x() * b.y() - b.x() * a.y();
  }
  CHECK(area > 0);
}

TEST_CASE("extract_ring on the unit icosphere") {
  const auto s = gen::icosphere(1.0, 4);
  const double expected = 2 * kPi * 0.5 * std::sqrt(1 - 0.25 / 4);
  for (Index v : {0u, 50u, 1000u}) {
    const auto ring = extract_ring(s, v, s.vertex(v).normalized(), 0.5);
    REQUIRE(ring.has_value());
    CHECK(std::abs(ring->length() - expected) <= 0.02 * expected);
  }
  CHECK_FALSE(extract_ring(s, 0, s.vertex(0), 10 * bbox(s).diagonal()).has_value());
}

TEST_CASE("resample_ring counts") {
  const double r = 0.3, s = 2 * kPi * r / 20;
  SUBCASE("exact circle gives 20 points") {
    const auto c = circle(r, 4000);
    auto pts = resample_ring(c, s, c.points[0].pos);
    REQUIRE(pts.has_value());
    CHECK(pts->size() == 20);
  }
  SUBCASE("perimeter 1.05 x 2 pi r gives 21 points") {
    const auto c = circle(1.05 * r, 4000);
    auto pts = resample_ring(c, s, c.points[0].pos);
    REQUIRE(pts.has_value());
    CHECK(pts->size() == 21);
  }
  SUBCASE("too short") {
    const auto c = circle(r, 200);
    CHECK_FALSE(resample_ring(c, c.length() * 10, c.points[0].pos).has_value());
  }
}

TEST_CASE("resample_ring commutes with rigid motion") {
  const auto c = circle(0.4, 37, 0.3);
  const double spacing = 2 * kPi * 0.4 / 20;
  const Vec3 hint(0.1, 0.5, 0.0);
  const auto a = resample_ring(c, spacing, hint);
  const Eigen::Affine3d xf = Eigen::Translation3d(1, 2, 3) * Eigen::AngleAxisd(1.1, Vec3(0.2, 1, 0.4).normalized());
  Polyline moved = c;
  for (auto& p : moved.points) p.pos = xf * p.pos;
  const auto b = resample_ring(moved, spacing, xf * hint);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  REQUIRE(a->size() == b->size());
  for (std::size_t i = 0; i < a->size(); ++i) CHECK(((xf * (*a)[i].pos) - (*b)[i].pos).norm() < 1e-9);
}

TEST_CASE("histogram_sample") {
  std::vector<double> v(20);
  std::iota(v.begin(), v.end(), 0.0);
  std::reverse(v.begin(), v.end());
  const auto h = histogram_sample(v);
  const std::array<double, 7> want{0, 2, 6, 10, 13, 17, 19};
  CHECK(h == want);

  const std::vector<double> constant(13, 4.5);
  for (double x : histogram_sample(constant)) CHECK(x == 4.5);

  const std::vector<double> seven{3, 1, 4, 1.5, 9, 2.6, 5};
  const auto h7 = histogram_sample(seven);
  CHECK(h7 == std::array<double, 7>{1, 1.5, 2.6, 3, 4, 5, 9});
  CHECK(std::is_sorted(h7.begin(), h7.end()));

  CHECK_THROWS(histogram_sample(std::vector<double>{}));
}

TEST_CASE("ring set radii match the schedule") {
  const auto s = gen::icosphere(1.0, 3);
  const auto radii = ring_radii(bbox(s).diagonal(), 5);
  const auto set = build_ring_set(s, s.vertex(7).normalized(), 7, radii);
  CHECK(set.radii == radii);
  CHECK(set.rings.size() == 5);
  for (std::size_t j = 0; j < set.rings.size(); ++j) {
    REQUIRE(set.rings[j].has_value());
    for (const auto& p : set.rings[j]->points) {
      CHECK(std::abs((p.pos - s.vertex(7)).norm() - radii[j]) < 1e-9 * radii[j]);
    }
  }
}
