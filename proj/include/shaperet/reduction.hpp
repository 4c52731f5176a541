#pragma once

#include <functional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "shaperet/descriptors.hpp"

namespace shaperet {

/// Dataset-wide PCA basis with eigenvalue truncation and per-dimension
/// [0, 1] normalization ranges.
struct ReductionModel {
  std::string kind;
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;        // input_dim x kept, orthonormal columns
  Eigen::VectorXd eigenvalues;  // all eigenvalues, descending
  Eigen::VectorXd lo, hi;       // projected training range per kept dimension

  Eigen::Index input_dim() const { return mean.size(); }
  Eigen::Index kept() const { return basis.cols(); }
};

/// Fraction of the leading eigenvalue below which directions are dropped.
inline constexpr double kEigenKeepRatio = 0.10;

/// Number of leading eigenvalues (descending) that stay at or above
/// `ratio` times the largest. Always at least 1.
Eigen::Index kept_dimensions(const Eigen::VectorXd& descending, double ratio = kEigenKeepRatio);

/// Populations visited in order, possibly loaded on demand; `load` may fill
/// and return the scratch matrix. Each population is visited three times.
struct PopulationSource {
  std::size_t count = 0;
  std::function<const RowMatrix&(std::size_t, RowMatrix& scratch)> load;
};

/// Fits over the rows of every population in the given order. Sums use a
/// fixed row-block partition per population, so the result does not depend
/// on thread count.
ReductionModel fit_reduction(const PopulationSource& source, std::string kind,
                             double ratio = kEigenKeepRatio, Exec exec = Exec::Parallel);
ReductionModel fit_reduction(std::span<const RowMatrix* const> populations, std::string kind,
                             double ratio = kEigenKeepRatio, Exec exec = Exec::Parallel);

/// Convenience overload: fields are ordered by mesh id before fitting.
ReductionModel fit_reduction(std::span<const DescriptorField> fields,
                             double ratio = kEigenKeepRatio, Exec exec = Exec::Parallel);

/// Principal-axis coordinates before normalization.
Eigen::VectorXd project(const ReductionModel& model, const Eigen::VectorXd& raw);

/// Projects and normalizes into [0, 1]^kept, clamping out-of-sample values.
Eigen::VectorXd apply_reduction(const ReductionModel& model, const Eigen::VectorXd& raw);
RowMatrix apply_reduction(const ReductionModel& model, const RowMatrix& raw,
                          Exec exec = Exec::Parallel);

}  // namespace shaperet
