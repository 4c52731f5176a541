#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shaperet/descriptors.hpp"
#include "shaperet/exec.hpp"
#include "shaperet/mesh.hpp"

namespace shaperet {

struct Dictionary {
  std::string kind;          // descriptor kind, or "A+B" for combined vectors
  RowMatrix centers;         // D x dim
  std::uint64_t seed = 0;
  int iterations = 0;        // Lloyd updates performed
  double objective = 0.0;    // final sum of squared distances
  std::vector<double> objective_history;  // after each assignment step

  Eigen::Index size() const { return centers.rows(); }
  Eigen::Index dim() const { return centers.cols(); }
};

struct KMeansOptions {
  int max_iter = 100;
  Exec exec = Exec::Parallel;
};

/// k-means++ seeding followed by Lloyd iterations. The result depends only on
/// (vectors, D, seed, max_iter).
Dictionary kmeans(const RowMatrix& vectors, Eigen::Index d, std::uint64_t seed,
                  const KMeansOptions& options = {});

/// Number of distinct rows.
Eigen::Index distinct_rows(const RowMatrix& vectors);

/// Nearest center; ties go to the lowest index.
Eigen::Index assign_word(const Eigen::Ref<const Eigen::VectorXd>& v, const RowMatrix& centers);
Eigen::Index assign_word(const Eigen::Ref<const Eigen::VectorXd>& v, const Dictionary& dict);

struct Signature {
  std::string mesh_id;
  Eigen::VectorXd histogram;
  std::size_t samples = 0;
};

Signature build_signature(std::string mesh_id, const RowMatrix& vectors, const Dictionary& dict);

double dissimilarity(const Signature& a, const Signature& b);

struct DistanceMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;  // M x M

  std::size_t size() const { return ids.size(); }
  std::size_t index_of(std::string_view id) const;  // throws when absent
};

DistanceMatrix distance_matrix(std::span<const Signature> signatures, Exec exec = Exec::Parallel);

enum class PointPairing { SamePoints, DifferentPoints };

/// Concatenates the rows of `a` at points_a with the rows of `b` at points_b.
/// SamePoints requires identical point lists; DifferentPoints pairs them by
/// position and requires equal counts.
RowMatrix combine_vectors(const RowMatrix& a, const RowMatrix& b, PointPairing mode,
                          std::span<const Index> points_a, std::span<const Index> points_b);

/// Rows of `field` at the given vertices, in order.
RowMatrix gather_rows(const RowMatrix& field, std::span<const Index> points);

Signature combine_histograms(const Signature& a, const Signature& b);

}  // namespace shaperet
