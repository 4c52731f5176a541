#include "shaperet/retrieval_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace shaperet {

std::vector<int> class_indices(const DistanceMatrix& dm, const Labeling& labels) {
  std::map<std::string, int> index;
  std::vector<int> out;
  out.reserve(dm.size());
  for (const auto& id : dm.ids) {
    const auto& cls = labels.lookup(id);
    const auto [it, fresh] = index.emplace(cls, static_cast<int>(index.size()));
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::size_t> ranked_list(const DistanceMatrix& dm, std::size_t query) {
  if (query >= dm.size()) throw std::invalid_argument("query index out of range");
  std::vector<std::size_t> order;
  order.reserve(dm.size() - 1);
  for (std::size_t i = 0; i < dm.size(); ++i) {
    if (i != query) order.push_back(i);
  }
  const auto q = static_cast<Eigen::Index>(query);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = dm.values(q, static_cast<Eigen::Index>(a));
    const double db = dm.values(q, static_cast<Eigen::Index>(b));
    if (da != db) return da < db;
    if (dm.ids[a] != dm.ids[b]) return dm.ids[a] < dm.ids[b];
    return a < b;
  });
  return order;
}

std::vector<std::string> ranked_ids(const DistanceMatrix& dm, std::string_view query) {
  std::vector<std::string> out;
  for (auto i : ranked_list(dm, dm.index_of(query))) out.push_back(dm.ids[i]);
  return out;
}

std::vector<double> recall_levels(const std::vector<int>& classes) {
  std::map<int, std::size_t> sizes;
  for (int c : classes) ++sizes[c];
  std::size_t uniform = 0;
  bool same = true;
  for (const auto& [c, n] : sizes) {
    if (uniform == 0) uniform = n;
    same = same && n == uniform;
  }
  std::vector<double> levels;
  if (same && uniform >= 2) {
    for (std::size_t j = 1; j < uniform; ++j) {
      levels.push_back(static_cast<double>(j) / static_cast<double>(uniform - 1));
    }
  } else {
    for (int j = 1; j <= kPrLevelsMixed; ++j) levels.push_back(j / double(kPrLevelsMixed));
  }
  return levels;
}

namespace {

struct QueryResult {
  bool counted = false;  // false for singleton classes
  double nn = 0, tier1 = 0, tier2 = 0, e = 0, dcg = 0;
  std::vector<double> precision, recall;  // per K = 1..M-1
  std::vector<double> interpolated;       // per recall level
};

QueryResult score_query(const DistanceMatrix& dm, const std::vector<int>& cls,
                        const std::vector<std::size_t>& class_size,
                        const std::vector<double>& levels, std::size_t q) {
  QueryResult r;
  const auto list = ranked_list(dm, q);
  const std::size_t c = class_size[static_cast<std::size_t>(cls[q])];
  const std::size_t mates = c - 1;

  // Query at rank 1, then the query-excluded list.
  double gain = 1.0, ideal = 1.0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const double rank = static_cast<double>(i + 2);
    if (cls[list[i]] == cls[q]) gain += 1.0 / std::log2(rank);
    if (i + 2 <= c) ideal += 1.0 / std::log2(rank);
  }
  r.dcg = gain / ideal;
  if (mates == 0) return r;
  r.counted = true;

  const auto m1 = list.size();
  std::vector<std::size_t> hits(m1 + 1, 0);  // hits[K] within the top K
  for (std::size_t k = 1; k <= m1; ++k) hits[k] = hits[k - 1] + (cls[list[k - 1]] == cls[q]);
  const auto at = [&](std::size_t k) { return hits[std::min(k, m1)]; };

  r.nn = static_cast<double>(at(1));
  r.tier1 = static_cast<double>(at(mates)) / static_cast<double>(mates);
  r.tier2 = static_cast<double>(at(2 * mates)) / static_cast<double>(mates);
  const std::size_t depth = std::min(kEMeasureDepth, m1);
  const double found = static_cast<double>(at(depth));
  if (found > 0) {
    const double p = found / static_cast<double>(depth);
    const double rc = found / static_cast<double>(mates);
    r.e = 2.0 / (1.0 / p + 1.0 / rc);
  }

  r.precision.resize(m1);
  r.recall.resize(m1);
  for (std::size_t k = 1; k <= m1; ++k) {
    r.precision[k - 1] = static_cast<double>(hits[k]) / static_cast<double>(k);
    r.recall[k - 1] = static_cast<double>(hits[k]) / static_cast<double>(mates);
  }
  // Recall is non-decreasing in K, so "recall >= level" selects a suffix of K.
  std::vector<double> suffix_max(m1 + 1, 0.0);
  for (std::size_t k = m1; k >= 1; --k) suffix_max[k - 1] = std::max(suffix_max[k], r.precision[k - 1]);
  r.interpolated.resize(levels.size());
  std::size_t k = 0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    while (k < m1 && r.recall[k] < levels[l] - 1e-12) ++k;
    r.interpolated[l] = suffix_max[k];
  }
  return r;
}

}  // namespace

RetrievalStats evaluate(const DistanceMatrix& dm, const Labeling& labels, Exec exec) {
  const auto m = dm.size();
  if (m < 2) throw std::invalid_argument("retrieval evaluation needs at least 2 objects");
  if (dm.values.rows() != static_cast<Eigen::Index>(m) ||
      dm.values.cols() != static_cast<Eigen::Index>(m)) {
    throw std::invalid_argument("distance matrix shape does not match its id list");
  }
  const auto cls = class_indices(dm, labels);
  std::vector<std::size_t> class_size(m, 0);
  for (int c : cls) ++class_size[static_cast<std::size_t>(c)];
  const auto levels = recall_levels(cls);

  std::vector<QueryResult> per(m);
  parallel_for(m, exec, [&](std::size_t q) { per[q] = score_query(dm, cls, class_size, levels, q); });

  RetrievalStats s;
  s.pr_raw.assign(m - 1, PrPoint{0, 0});
  s.pr_curve.resize(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) s.pr_curve[l] = {levels[l], 0.0};
  double dcg_sum = 0.0;
  for (const auto& r : per) {
    dcg_sum += r.dcg;
    if (!r.counted) {
      ++s.skipped;
      continue;
    }
    ++s.queries;
    s.nn += r.nn;
    s.tier1 += r.tier1;
    s.tier2 += r.tier2;
    s.e_measure += r.e;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      s.pr_raw[k].recall += r.recall[k];
      s.pr_raw[k].precision += r.precision[k];
    }
    for (std::size_t l = 0; l < levels.size(); ++l) s.pr_curve[l].precision += r.interpolated[l];
  }
  s.dcg = dcg_sum / static_cast<double>(m);
  if (s.queries > 0) {
    const double n = static_cast<double>(s.queries);
    s.nn /= n;
    s.tier1 /= n;
    s.tier2 /= n;
    s.e_measure /= n;
    for (auto& p : s.pr_raw) {
      p.recall /= n;
      p.precision /= n;
    }
    for (auto& p : s.pr_curve) p.precision /= n;
  }
  return s;
}

TierScores nn_tier_scores(const DistanceMatrix& dm, const Labeling& labels) {
  const auto s = evaluate(dm, labels);
  return {s.nn, s.tier1, s.tier2};
}

double e_measure(const DistanceMatrix& dm, const Labeling& labels) {
  return evaluate(dm, labels).e_measure;
}

double dcg(const DistanceMatrix& dm, const Labeling& labels) { return evaluate(dm, labels).dcg; }

std::vector<PrPoint> precision_recall(const DistanceMatrix& dm, const Labeling& labels) {
  return evaluate(dm, labels).pr_curve;
}

void write_stats_csv(const std::filesystem::path& path, std::string_view method,
                     std::string_view parameters, const RetrievalStats& s, bool append) {
  const bool header = !append || !std::filesystem::exists(path) ||
                      std::filesystem::file_size(path) == 0;
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (header) out << "method,parameters,nn,tier1,tier2,e_measure,dcg\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f", s.nn, s.tier1, s.tier2, s.e_measure,
                s.dcg);
  out << method << ',' << parameters << ',' << buf << '\n';
}

void write_pr_csv(const std::filesystem::path& path, const std::vector<PrPoint>& curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "recall,precision\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.recall, p.precision);
    out << buf;
  }
}

}  // namespace shaperet
