#include "shaperet/reduction.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace shaperet {

namespace {

// Sums fn(row) over fixed-size row blocks of one population, then adds the
// block partials in block order.
template <typename Acc, typename Fn>
void blocked_sum(const RowMatrix& rows, Acc& total, Exec exec, Fn&& fn) {
  const auto n = rows.rows();
  const auto block = static_cast<Eigen::Index>(kReductionBlock);
  const auto nblocks = static_cast<std::size_t>((n + block - 1) / block);
  std::vector<Acc> partial(nblocks, Acc::Zero(total.rows(), total.cols()));
  parallel_for(nblocks, exec, [&](std::size_t b) {
    const auto begin = static_cast<Eigen::Index>(b) * block;
    const auto end = std::min(n, begin + block);
    for (Eigen::Index r = begin; r < end; ++r) fn(partial[b], rows.row(r));
  });
  for (auto& p : partial) total += p;
}

}  // namespace

Eigen::Index kept_dimensions(const Eigen::VectorXd& descending, double ratio) {
  if (descending.size() == 0) return 0;
  const double top = descending[0];
  if (!(top > 0.0)) return 1;
  // Relative slack keeps eigenvalues that sit exactly on the threshold.
  const double threshold = ratio * top * (1.0 - 1e-9);
  Eigen::Index kept = 0;
  while (kept < descending.size() && descending[kept] >= threshold) ++kept;
  return std::max<Eigen::Index>(kept, 1);
}

ReductionModel fit_reduction(const PopulationSource& source, std::string kind, double ratio,
                             Exec exec) {
  if (source.count == 0) throw std::invalid_argument("no descriptor vectors to reduce");
  RowMatrix scratch;
  Eigen::Index dim = -1, n = 0;
  Eigen::VectorXd sum;
  for (std::size_t i = 0; i < source.count; ++i) {
    const RowMatrix& pop = source.load(i, scratch);
    if (dim < 0) {
      dim = pop.cols();
      sum = Eigen::VectorXd::Zero(dim);
    }
    if (pop.cols() != dim) throw std::invalid_argument("descriptor populations differ in length");
    n += pop.rows();
    blocked_sum(pop, sum, exec, [](Eigen::VectorXd& acc, const auto& row) { acc += row.transpose(); });
  }
  if (n < 2) throw std::invalid_argument("reduction needs at least 2 vectors");
  ReductionModel model;
  model.kind = std::move(kind);
  model.mean = sum / static_cast<double>(n);

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < source.count; ++i) {
    blocked_sum(source.load(i, scratch), scatter, exec, [&](Eigen::MatrixXd& acc, const auto& row) {
      const Eigen::VectorXd d = row.transpose() - model.mean;
      acc.selfadjointView<Eigen::Lower>().rankUpdate(d);
    });
  }
  Eigen::MatrixXd cov = scatter.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw std::runtime_error("covariance eigendecomposition failed");
  model.eigenvalues = es.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = es.eigenvectors().rowwise().reverse();
  const auto kept = kept_dimensions(model.eigenvalues, ratio);
  model.basis = vectors.leftCols(kept);
  // Sign convention: largest-magnitude component of each axis is positive.
  for (Eigen::Index c = 0; c < kept; ++c) {
    Eigen::Index arg = 0;
    model.basis.col(c).cwiseAbs().maxCoeff(&arg);
    if (model.basis(arg, c) < 0) model.basis.col(c) *= -1.0;
  }

  model.lo = Eigen::VectorXd::Constant(kept, std::numeric_limits<double>::infinity());
  model.hi = Eigen::VectorXd::Constant(kept, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < source.count; ++i) {
    const RowMatrix& pop = source.load(i, scratch);
    // Same per-row projection as apply_reduction, so training extremes map to exactly 0 and 1.
    RowMatrix y(pop.rows(), kept);
    parallel_for(static_cast<std::size_t>(pop.rows()), exec, [&](std::size_t r) {
      const auto row = static_cast<Eigen::Index>(r);
      y.row(row) = project(model, Eigen::VectorXd(pop.row(row).transpose())).transpose();
    });
    model.lo = model.lo.cwiseMin(y.colwise().minCoeff().transpose());
    model.hi = model.hi.cwiseMax(y.colwise().maxCoeff().transpose());
  }
  return model;
}

ReductionModel fit_reduction(std::span<const RowMatrix* const> populations, std::string kind,
                             double ratio, Exec exec) {
  const PopulationSource source{
      populations.size(),
      [&](std::size_t i, RowMatrix&) -> const RowMatrix& { return *populations[i]; }};
  return fit_reduction(source, std::move(kind), ratio, exec);
}

ReductionModel fit_reduction(std::span<const DescriptorField> fields, double ratio, Exec exec) {
  if (fields.empty()) throw std::invalid_argument("no descriptor fields to reduce");
  std::vector<const DescriptorField*> order;
  for (const auto& f : fields) order.push_back(&f);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->mesh_id < b->mesh_id; });
  std::vector<const RowMatrix*> pops;
  for (const auto* f : order) {
    if (f->kind != fields.front().kind) {
      throw std::invalid_argument("cannot reduce fields of different descriptor kinds together");
    }
    pops.push_back(&f->values);
  }
  return fit_reduction(pops, std::string(to_string(fields.front().kind)), ratio, exec);
}

Eigen::VectorXd project(const ReductionModel& model, const Eigen::VectorXd& raw) {
  if (raw.size() != model.input_dim()) {
    throw std::invalid_argument("descriptor length " + std::to_string(raw.size()) +
                                " does not match reduction input " +
                                std::to_string(model.input_dim()));
  }
  return model.basis.transpose() * (raw - model.mean);
}

Eigen::VectorXd apply_reduction(const ReductionModel& model, const Eigen::VectorXd& raw) {
  Eigen::VectorXd y = project(model, raw);
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double span = model.hi[k] - model.lo[k];
    y[k] = span > 0.0 ? std::clamp((y[k] - model.lo[k]) / span, 0.0, 1.0) : 0.5;
  }
  return y;
}

RowMatrix apply_reduction(const ReductionModel& model, const RowMatrix& raw, Exec exec) {
  RowMatrix out(raw.rows(), model.kept());
  parallel_for(static_cast<std::size_t>(raw.rows()), exec, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r) = apply_reduction(model, Eigen::VectorXd(raw.row(r).transpose())).transpose();
  });
  return out;
}

}  // namespace shaperet
