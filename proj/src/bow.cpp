#include "shaperet/bow.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "shaperet/random.hpp"

namespace shaperet {

namespace {

double dist2(const Eigen::Ref<const Eigen::RowVectorXd>& a,
             const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  return (a - b).squaredNorm();
}

// Nearest center per row plus the squared distance to it.
void assign_all(const RowMatrix& x, const RowMatrix& centers, Exec exec,
                std::vector<Eigen::Index>& labels, std::vector<double>& d2) {
  const auto n = static_cast<std::size_t>(x.rows());
  labels.resize(n);
  d2.resize(n);
  parallel_for(n, exec, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = dist2(x.row(r), centers.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels[i] = best;
    d2[i] = best_d;
  });
}

RowMatrix seed_plus_plus(const RowMatrix& x, Eigen::Index d, Rng& rng) {
  const auto n = x.rows();
  RowMatrix centers(d, x.cols());
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = x.row(first);
  for (Eigen::Index c = 1; c < d; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& m = nearest[static_cast<std::size_t>(i)];
      m = std::min(m, dist2(x.row(i), centers.row(c - 1)));
      total += m;
    }
    const double target = rng.uniform() * total;
    double acc = 0.0;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = nearest[static_cast<std::size_t>(i)];
      if (w <= 0.0) continue;
      acc += w;
      pick = i;
      if (acc > target) break;
    }
    centers.row(c) = x.row(pick);
  }
  return centers;
}

}  // namespace

Eigen::Index distinct_rows(const RowMatrix& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(vectors.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
      if (vectors(a, c) != vectors(b, c)) return vectors(a, c) < vectors(b, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  Eigen::Index count = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || less(order[i - 1], order[i])) ++count;
  }
  return count;
}

Dictionary kmeans(const RowMatrix& x, Eigen::Index d, std::uint64_t seed,
                  const KMeansOptions& options) {
  if (d < 1) throw std::invalid_argument("dictionary size must be at least 1");
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!x.allFinite()) throw std::invalid_argument("k-means input contains non-finite values");
  const auto distinct = distinct_rows(x);
  if (d > distinct) {
    throw std::invalid_argument("dictionary size " + std::to_string(d) + " exceeds the " +
                                std::to_string(distinct) + " distinct input vectors");
  }
  const auto n = static_cast<std::size_t>(x.rows());
  Rng rng(seed);
  Dictionary dict;
  dict.seed = seed;
  dict.centers = seed_plus_plus(x, d, rng);

  std::vector<Eigen::Index> labels, previous;
  std::vector<double> d2;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    assign_all(x, dict.centers, options.exec, labels, d2);
    dict.objective_history.push_back(std::accumulate(d2.begin(), d2.end(), 0.0));
    if (labels == previous) break;
    previous = labels;

    std::vector<std::size_t> count(static_cast<std::size_t>(d), 0);
    for (auto l : labels) ++count[static_cast<std::size_t>(l)];
    // Refill empty clusters with the worst-fit point of a cluster that can spare one.
    for (Eigen::Index c = 0; c < d; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (count[static_cast<std::size_t>(labels[i])] < 2) continue;
        if (far == n || d2[i] > d2[far]) far = i;
      }
      --count[static_cast<std::size_t>(labels[far])];
      labels[far] = c;
      d2[far] = 0.0;
      count[static_cast<std::size_t>(c)] = 1;
    }
    previous = labels;

    RowMatrix sums = RowMatrix::Zero(d, x.cols());
    for (std::size_t i = 0; i < n; ++i) sums.row(labels[i]) += x.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index c = 0; c < d; ++c) {
      dict.centers.row(c) = sums.row(c) / static_cast<double>(count[static_cast<std::size_t>(c)]);
    }
    ++dict.iterations;
  }
  assign_all(x, dict.centers, options.exec, labels, d2);
  dict.objective = std::accumulate(d2.begin(), d2.end(), 0.0);
  if (dict.objective_history.empty() || dict.objective != dict.objective_history.back()) {
    dict.objective_history.push_back(dict.objective);
  }
  return dict;
}

Eigen::Index assign_word(const Eigen::Ref<const Eigen::VectorXd>& v, const RowMatrix& centers) {
  if (v.size() != centers.cols()) {
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " does not match dictionary dimension " +
                                std::to_string(centers.cols()));
  }
  Eigen::Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double dd = (centers.row(c).transpose() - v).squaredNorm();
    if (dd < best_d) {
      best_d = dd;
      best = c;
    }
  }
  return best;
}

Eigen::Index assign_word(const Eigen::Ref<const Eigen::VectorXd>& v, const Dictionary& dict) {
  return assign_word(v, dict.centers);
}

Signature build_signature(std::string mesh_id, const RowMatrix& vectors, const Dictionary& dict) {
  if (vectors.rows() == 0) {
    throw std::invalid_argument("no sample vectors for mesh '" + mesh_id + "'");
  }
  Signature sig{std::move(mesh_id), Eigen::VectorXd::Zero(dict.size()),
                static_cast<std::size_t>(vectors.rows())};
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    sig.histogram[assign_word(vectors.row(r).transpose(), dict)] += 1.0;
  }
  sig.histogram /= static_cast<double>(vectors.rows());
  return sig;
}

double dissimilarity(const Signature& a, const Signature& b) {
  if (a.histogram.size() != b.histogram.size()) {
    throw std::invalid_argument("signature lengths differ (" + std::to_string(a.histogram.size()) +
                                " vs " + std::to_string(b.histogram.size()) + ")");
  }
  return (a.histogram - b.histogram).norm();
}

std::size_t DistanceMatrix::index_of(std::string_view id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw std::invalid_argument("unknown mesh id '" + std::string(id) + "'");
  return static_cast<std::size_t>(it - ids.begin());
}

DistanceMatrix distance_matrix(std::span<const Signature> sigs, Exec exec) {
  DistanceMatrix dm;
  const auto m = sigs.size();
  for (const auto& s : sigs) {
    if (s.histogram.size() != sigs.front().histogram.size()) {
      throw std::invalid_argument("signature '" + s.mesh_id + "' has a different length");
    }
    dm.ids.push_back(s.mesh_id);
  }
  dm.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  parallel_for(m, exec, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = dissimilarity(sigs[i], sigs[j]);
      dm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      dm.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  });
  return dm;
}

RowMatrix gather_rows(const RowMatrix& field, std::span<const Index> points) {
  RowMatrix out(static_cast<Eigen::Index>(points.size()), field.cols());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] >= field.rows()) throw std::out_of_range("sample point index out of range");
    out.row(static_cast<Eigen::Index>(i)) = field.row(points[i]);
  }
  return out;
}

RowMatrix combine_vectors(const RowMatrix& a, const RowMatrix& b, PointPairing mode,
                          std::span<const Index> points_a, std::span<const Index> points_b) {
  if (mode == PointPairing::SamePoints &&
      !std::equal(points_a.begin(), points_a.end(), points_b.begin(), points_b.end())) {
    throw std::invalid_argument("same-points combination needs identical point lists");
  }
  if (points_a.size() != points_b.size()) {
    throw std::invalid_argument("different-points combination needs equal point counts (" +
                                std::to_string(points_a.size()) + " vs " +
                                std::to_string(points_b.size()) + ")");
  }
  RowMatrix out(static_cast<Eigen::Index>(points_a.size()), a.cols() + b.cols());
  out.leftCols(a.cols()) = gather_rows(a, points_a);
  out.rightCols(b.cols()) = gather_rows(b, points_b);
  return out;
}

Signature combine_histograms(const Signature& a, const Signature& b) {
  if (a.histogram.size() != b.histogram.size()) {
    throw std::invalid_argument("cannot concatenate histograms of different dictionary sizes");
  }
  if (a.mesh_id != b.mesh_id) {
    throw std::invalid_argument("histograms belong to different meshes");
  }
  Signature out{a.mesh_id, Eigen::VectorXd(a.histogram.size() * 2), a.samples + b.samples};
  out.histogram << a.histogram, b.histogram;
  return out;
}

}  // namespace shaperet
