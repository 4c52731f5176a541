#include <doctest.h>

#include "shaperet/random.hpp"
#include "shaperet/reduction.hpp"

using namespace shaperet;

namespace {

// The 8 corners (+-a, +-b, +-c): sample covariance diag(8/7 a^2, 8/7 b^2, 8/7 c^2).
RowMatrix box_corners(const Eigen::Vector3d& variances) {
  RowMatrix x(8, 3);
  for (int i = 0; i < 8; ++i) {
    for (int d = 0; d < 3; ++d) {
      const double s = std::sqrt(variances[d] * 7.0 / 8.0);
      x(i, d) = (i >> d) & 1 ? s : -s;
    }
  }
  return x;
}

ReductionModel fit(const RowMatrix& x, Exec exec = Exec::Parallel) {
  const RowMatrix* pops[] = {&x};
  return fit_reduction(std::span<const RowMatrix* const>(pops), "test", kEigenKeepRatio, exec);
}

RowMatrix random_rows(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix m(n, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * (1 + i % dim);
  return m;
}

}  // namespace

TEST_CASE("eigenvalue truncation rule") {
  CHECK(kept_dimensions(Eigen::Vector3d(100, 50, 9)) == 2);
  CHECK(kept_dimensions(Eigen::Vector2d(100, 10)) == 2);
  CHECK(kept_dimensions(Eigen::Vector3d(100, 10, 10)) == 3);
  CHECK(kept_dimensions(Eigen::Vector3d(0, 0, 0)) == 1);
  CHECK(kept_dimensions(Eigen::Vector3d(5, 0.1, 0)) == 1);
}

TEST_CASE("fit on synthetic spectra") {
  SUBCASE("{100, 50, 9}") {
    const auto m = fit(box_corners(Eigen::Vector3d(50, 9, 100)));
    CHECK(m.kept() == 2);
    CHECK(m.eigenvalues[0] == doctest::Approx(100).epsilon(1e-12));
    CHECK(m.eigenvalues[1] == doctest::Approx(50).epsilon(1e-12));
    CHECK(m.eigenvalues[2] == doctest::Approx(9).epsilon(1e-12));
  }
  SUBCASE("{100, 10}") {
    RowMatrix x(4, 2);
    const double a = std::sqrt(100 * 3.0 / 4), b = std::sqrt(10 * 3.0 / 4);
    x << a, b, a, -b, -a, b, -a, -b;
    const auto m = fit(x);
    CHECK(m.kept() == 2);
  }
  SUBCASE("points on a line") {
    RowMatrix x(6, 3);
    for (int i = 0; i < 6; ++i) x.row(i) = Eigen::RowVector3d(1, 2, 3) * (0.3 * i - 1) + Eigen::RowVector3d(4, 0, 1);
    const auto m = fit(x);
    CHECK(m.kept() == 1);
    CHECK(std::abs(std::abs(m.basis.col(0).dot(Eigen::Vector3d(1, 2, 3).normalized())) - 1) < 1e-12);
  }
  SUBCASE("zero variance keeps one dimension at 0.5") {
    RowMatrix x = RowMatrix::Constant(5, 4, 2.5);
    const auto m = fit(x);
    CHECK(m.kept() == 1);
    const auto y = apply_reduction(m, Eigen::VectorXd(x.row(0).transpose()));
    CHECK(y[0] == 0.5);
  }
}

TEST_CASE("normalization into [0, 1]") {
  const auto x = random_rows(10, 5, 21);
  const auto m = fit(x);
  REQUIRE(m.kept() >= 1);
  const auto y = apply_reduction(m, x);
  CHECK(y.minCoeff() >= 0.0);
  CHECK(y.maxCoeff() <= 1.0);
  for (Eigen::Index k = 0; k < m.kept(); ++k) {
    // The training point at the minimum of dimension k maps to exactly 0 there.
    Eigen::Index lo_row, hi_row;
    y.col(k).minCoeff(&lo_row);
    y.col(k).maxCoeff(&hi_row);
    CHECK(y(lo_row, k) == 0.0);
    CHECK(y(hi_row, k) == 1.0);
  }
  // Mean vector: the normalized image of a zero projection.
  const auto ym = apply_reduction(m, m.mean);
  for (Eigen::Index k = 0; k < m.kept(); ++k) {
    CHECK(ym[k] == doctest::Approx((0 - m.lo[k]) / (m.hi[k] - m.lo[k])).epsilon(1e-12));
  }
  // Out-of-sample values clamp.
  const Eigen::VectorXd far = m.mean + 1e6 * m.basis.col(0);
  CHECK(apply_reduction(m, far)[0] == 1.0);
  CHECK_THROWS(apply_reduction(m, Eigen::VectorXd(Eigen::VectorXd::Zero(4))));
}

TEST_CASE("basis is orthonormal and eigenvalues descend") {
  const auto x = random_rows(200, 12, 5);
  const auto m = fit(x);
  const Eigen::MatrixXd gram = m.basis.transpose() * m.basis;
  CHECK((gram - Eigen::MatrixXd::Identity(m.kept(), m.kept())).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index i = 1; i < m.eigenvalues.size(); ++i) CHECK(m.eigenvalues[i] <= m.eigenvalues[i - 1]);
  CHECK((m.mean - x.colwise().mean().transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("streaming populations equal one stacked population") {
  const auto a = random_rows(300, 6, 1), b = random_rows(170, 6, 2);
  RowMatrix stacked(470, 6);
  stacked << a, b;
  const RowMatrix* two[] = {&a, &b};
  const auto split = fit_reduction(std::span<const RowMatrix* const>(two), "t");
  const auto whole = fit(stacked);
  CHECK(split.kept() == whole.kept());
  CHECK((split.eigenvalues - whole.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS(fit(RowMatrix(1, 3)));
}

TEST_CASE("reduction is identical serially and across thread counts") {
  const auto x = random_rows(9000, 10, 8);
  const auto s = fit(x, Exec::Serial);
  for (int t : {1, 2, 5}) {
    ThreadCountGuard guard(t);
    const auto p = fit(x, Exec::Parallel);
    CHECK(p.mean == s.mean);
    CHECK(p.basis == s.basis);
    CHECK(p.lo == s.lo);
    CHECK(p.hi == s.hi);
    CHECK(apply_reduction(p, x, Exec::Parallel) == apply_reduction(s, x, Exec::Serial));
  }
}
