#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "shaperet/bow.hpp"
#include "shaperet/random.hpp"

using namespace shaperet;

namespace {

RowMatrix random_rows(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix m(n, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

Signature sig(std::string id, std::initializer_list<double> h) {
  Signature s;
  s.mesh_id = std::move(id);
  s.histogram = Eigen::Map<const Eigen::VectorXd>(h.begin(), static_cast<Eigen::Index>(h.size()));
  return s;
}

bool has_row(const RowMatrix& m, const Eigen::RowVectorXd& r) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.row(i) == r) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("k-means small cases") {
  SUBCASE("four points, two clusters") {
    RowMatrix x(4, 2);
    x << 0, 0, 0, 1, 10, 0, 10, 1;
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < 4; ++i) pts.emplace_back(x(i, 0), x(i, 1));
    const double best = oracle::best_two_partition(pts);
    CHECK(best == 1.0);
    for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
      const auto d = kmeans(x, 2, seed);
      CHECK(d.objective == doctest::Approx(best).epsilon(1e-12));
      CHECK(has_row(d.centers, Eigen::RowVector2d(0, 0.5)));
      CHECK(has_row(d.centers, Eigen::RowVector2d(10, 0.5)));
    }
  }
  SUBCASE("D equals the number of distinct vectors") {
    RowMatrix x(7, 3);
    x << 1, 2, 3, 4, 5, 6, 1, 2, 3, 0, 0, 1, 4, 5, 6, 9, 9, 9, 0, 0, 1;
    CHECK(distinct_rows(x) == 4);
    const auto d = kmeans(x, 4, 5);
    CHECK(d.objective == 0.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(has_row(d.centers, x.row(i)));
    CHECK_THROWS(kmeans(x, 5, 5));
  }
  SUBCASE("D = 1 gives the mean") {
    const auto x = random_rows(50, 4, 3);
    const auto d = kmeans(x, 1, 1);
    CHECK((d.centers.row(0) - x.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("bad arguments") {
    const auto x = random_rows(10, 2, 3);
    CHECK_THROWS(kmeans(x, 0, 1));
    KMeansOptions o;
    o.max_iter = 0;
    CHECK_THROWS(kmeans(x, 2, 1, o));
    RowMatrix bad = x;
    bad(3, 1) = std::nan("");
    CHECK_THROWS(kmeans(bad, 2, 1));
  }
}

TEST_CASE("k-means objective never increases") {
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    const auto x = random_rows(200 + 10 * static_cast<int>(inst), 3, 1000 + inst);
    const auto d = kmeans(x, 12, inst);
    REQUIRE(d.objective_history.size() >= 2);
    for (std::size_t i = 1; i < d.objective_history.size(); ++i) {
      CHECK(d.objective_history[i] <= d.objective_history[i - 1] * (1 + 1e-12));
    }
    CHECK(d.objective == d.objective_history.back());
    // Reported objective is the sum of squared distances to the nearest center.
    double sse = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const auto w = assign_word(x.row(r).transpose(), d);
      sse += (x.row(r) - d.centers.row(w)).squaredNorm();
    }
    CHECK(d.objective == doctest::Approx(sse).epsilon(1e-10));
  }
}

TEST_CASE("k-means is identical across thread counts") {
  const auto x = random_rows(3000, 5, 77);
  KMeansOptions serial;
  serial.exec = Exec::Serial;
  const auto ref = kmeans(x, 40, 8, serial);
  for (int t : {1, 2, 4, 7}) {
    ThreadCountGuard guard(t);
    const auto d = kmeans(x, 40, 8);
    CHECK(d.centers == ref.centers);
    CHECK(d.objective_history == ref.objective_history);
    CHECK(d.iterations == ref.iterations);
  }
  CHECK(kmeans(x, 40, 9).centers != ref.centers);
}

TEST_CASE("assign_word") {
  RowMatrix c(5, 2);
  c << 0, 0, 1, 1, 2, 2, 3, 3, 4, 4;
  CHECK(assign_word(Eigen::Vector2d(3, 3), c) == 3);
  RowMatrix line(2, 1);
  line << 0, 1;
  CHECK(assign_word(Eigen::VectorXd::Constant(1, 0.9), line) == 1);
  CHECK(assign_word(Eigen::VectorXd::Constant(1, 0.5), line) == 0);
  CHECK_THROWS(assign_word(Eigen::Vector3d(0, 0, 0), c));
}

TEST_CASE("signatures") {
  Dictionary d;
  d.centers.resize(3, 1);
  d.centers << 0, 10, 20;
  RowMatrix near0(4, 1);
  near0 << 0.1, -1, 2, 4.9;
  const auto a = build_signature("a", near0, d);
  CHECK(a.histogram == Eigen::Vector3d(1, 0, 0));
  CHECK(a.samples == 4);
  RowMatrix mixed(4, 1);
  mixed << 0, 1, 11, 19;
  const auto b = build_signature("b", mixed, d);
  CHECK(b.histogram == Eigen::Vector3d(0.5, 0.25, 0.25));
  const auto r = build_signature("r", random_rows(37, 1, 4) * 20.0, d);
  CHECK(r.histogram.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS(build_signature("e", RowMatrix(0, 1), d));
}

TEST_CASE("dissimilarity and distance matrix") {
  const auto e0 = sig("a", {1, 0, 0}), e1 = sig("b", {0, 1, 0});
  CHECK(dissimilarity(e0, e0) == 0.0);
  CHECK(dissimilarity(e0, e1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS(dissimilarity(e0, sig("c", {1, 0})));
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto p = sig("p", {rng.uniform(), rng.uniform()}), q = sig("q", {rng.uniform(), rng.uniform()});
    CHECK(dissimilarity(p, q) == dissimilarity(q, p));
  }

  const std::vector<Signature> same(4, e0);
  CHECK(distance_matrix(same).values.isZero(0.0));
  const std::vector<Signature> two{e0, e1};
  const auto dm2 = distance_matrix(two);
  CHECK(dm2.values(0, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(dm2.index_of("b") == 1);
  CHECK_THROWS(dm2.index_of("zz"));
  const std::vector<Signature> mixed{e0, sig("c", {1, 0})};
  CHECK_THROWS(distance_matrix(mixed));

  const auto h = random_rows(30, 8, 11);
  std::vector<Signature> many;
  for (int i = 0; i < 30; ++i) many.push_back({"s" + std::to_string(i), h.row(i).transpose(), 1});
  const auto s = distance_matrix(many, Exec::Serial);
  ThreadCountGuard guard(3);
  const auto p = distance_matrix(many, Exec::Parallel);
  CHECK(s.values == p.values);
  CHECK(s.values == s.values.transpose());
  CHECK(s.values.diagonal().isZero(0.0));
}

TEST_CASE("combination algebra") {
  const auto a = random_rows(10, 35, 1), b = random_rows(12, 35, 2);
  const std::vector<Index> pts{0, 3, 5, 9};
  const auto vs = combine_vectors(a, a, PointPairing::SamePoints, pts, pts);
  CHECK(vs.cols() == 70);
  CHECK(vs.rows() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(vs.row(i).head(35) == a.row(pts[i]));
    CHECK(vs.row(i).tail(35) == a.row(pts[i]));
  }
  const std::vector<Index> other{1, 2, 11, 0};
  CHECK_THROWS(combine_vectors(a, b, PointPairing::SamePoints, pts, other));
  const auto vd = combine_vectors(a, b, PointPairing::DifferentPoints, pts, other);
  CHECK(vd == combine_vectors(a, b, PointPairing::DifferentPoints, pts, other));
  CHECK(vd.row(2).tail(35) == b.row(11));
  const std::vector<Index> short_list{1, 2};
  CHECK_THROWS(combine_vectors(a, b, PointPairing::DifferentPoints, pts, short_list));

  const auto h = combine_histograms(sig("m", {1, 0}), sig("m", {0, 1}));
  CHECK(h.histogram == Eigen::Vector4d(1, 0, 0, 1));
  CHECK_THROWS(combine_histograms(sig("m", {1, 0}), sig("m", {0, 0, 1})));

  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    auto r = [&] { return sig("x", {rng.uniform(), rng.uniform(), rng.uniform()}); };
    const auto a1 = r(), a2 = r(), b1 = r(), b2 = r();
    const double lhs = std::pow(dissimilarity(combine_histograms(a1, a2), combine_histograms(b1, b2)), 2);
    const double rhs = std::pow(dissimilarity(a1, b1), 2) + std::pow(dissimilarity(a2, b2), 2);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}
