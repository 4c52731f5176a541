#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shaperet/bow.hpp"
#include "shaperet/exec.hpp"

namespace shaperet {

/// Mesh id -> leaf class name.
struct Labeling {
  std::map<std::string, std::string> class_of;

  std::size_t size() const { return class_of.size(); }
  /// Class of `id`. An id missing verbatim is retried with its leading
  /// non-digit prefix removed ("T261" -> "261"). Throws when still absent.
  const std::string& lookup(std::string_view id) const;
};

/// Princeton Shape Benchmark classification text ("PSB <version>" header).
Labeling parse_cla(std::string_view text);
/// "id,class" lines; an optional header line "id,class" is skipped.
Labeling parse_label_csv(std::string_view text);
/// Detects the format from the first token.
Labeling parse_labels(std::string_view text);
Labeling read_labels(const std::filesystem::path& path);

/// Class index per matrix row, in matrix order.
std::vector<int> class_indices(const DistanceMatrix& dm, const Labeling& labels);

/// Matrix indices ordered by ascending dissimilarity to `query`, ties by
/// ascending id; the query itself is excluded.
std::vector<std::size_t> ranked_list(const DistanceMatrix& dm, std::size_t query);
std::vector<std::string> ranked_ids(const DistanceMatrix& dm, std::string_view query);

struct PrPoint {
  double recall;
  double precision;
};

struct RetrievalStats {
  double nn = 0, tier1 = 0, tier2 = 0, e_measure = 0, dcg = 0;
  std::vector<PrPoint> pr_curve;  // interpolated, at fixed recall levels
  std::vector<PrPoint> pr_raw;    // mean recall/precision for K = 1..M-1
  std::size_t queries = 0;        // queries contributing to nn/tiers/E/PR
  std::size_t skipped = 0;        // singleton-class queries
};

inline constexpr std::size_t kEMeasureDepth = 32;
inline constexpr int kPrLevelsMixed = 20;

RetrievalStats evaluate(const DistanceMatrix& dm, const Labeling& labels,
                        Exec exec = Exec::Parallel);

struct TierScores {
  double nn, tier1, tier2;
};
TierScores nn_tier_scores(const DistanceMatrix& dm, const Labeling& labels);
double e_measure(const DistanceMatrix& dm, const Labeling& labels);
double dcg(const DistanceMatrix& dm, const Labeling& labels);
std::vector<PrPoint> precision_recall(const DistanceMatrix& dm, const Labeling& labels);

/// Recall levels used for the interpolated curve.
std::vector<double> recall_levels(const std::vector<int>& classes);

void write_stats_csv(const std::filesystem::path& path, std::string_view method,
                     std::string_view parameters, const RetrievalStats& stats, bool append = false);
void write_pr_csv(const std::filesystem::path& path, const std::vector<PrPoint>& curve);

}  // namespace shaperet
