#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "shaperet/retrieval_eval.hpp"

namespace shaperet {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Line chart with axes from 0 to the data maximum (or 1 for unit data).
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series,
                              bool unit_axes);

struct StatsRow {
  std::string method, parameters;
  double nn, tier1, tier2, e_measure, dcg;
  /// Numeric value of `key` in the "k=v;k=v" parameter string; NaN if absent.
  double parameter(const std::string& key) const;
};

std::vector<StatsRow> read_stats_csv(const std::filesystem::path& path);
std::vector<PrPoint> read_pr_csv(const std::filesystem::path& path);

/// Curves from several PR CSV files, one series each (labelled by file stem).
std::string render_pr_svg(const std::vector<std::filesystem::path>& pr_files);

/// One chart per method: the five statistics against the parameter `key`.
/// Returns (method, svg) pairs.
std::vector<std::pair<std::string, std::string>> render_sweeps(const std::vector<StatsRow>& rows,
                                                               const std::string& key);

}  // namespace shaperet
