#include "shaperet/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "shaperet/mesh.hpp"

namespace shaperet {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) {
    while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
    cells.push_back(c);
  }
  return cells;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series,
                              bool unit_axes) {
  constexpr double W = 640, H = 440, L = 70, R = 170, T = 40, B = 60;
  double xmax = unit_axes ? 1.0 : 0.0, ymax = unit_axes ? 1.0 : 0.0;
  double xmin = 0.0;
  if (!unit_axes) {
    xmin = std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
      for (double x : s.x) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      for (double y : s.y) ymax = std::max(ymax, y);
    }
    if (!std::isfinite(xmin)) xmin = 0;
    if (xmax <= xmin) xmax = xmin + 1;
    ymax = std::max(ymax, 1e-12);
    if (ymax <= 1.0) ymax = 1.0;
  }
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title)
    << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0, fy = ymax * i / 5.0;
    o << "<line x1=\"" << px(fx) << "\" y1=\"" << py(0) << "\" x2=\"" << px(fx) << "\" y2=\""
      << py(ymax) << "\" stroke=\"#eee\"/>\n"
      << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(fy) << "\" x2=\"" << px(xmax) << "\" y2=\""
      << py(fy) << "\" stroke=\"#eee\"/>\n"
      << "<text x=\"" << px(fx) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">"
      << num(fx) << "</text>\n"
      << "<text x=\"" << px(xmin) - 8 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">"
      << num(fy) << "</text>\n";
  }
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
    << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n"
    << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
    << esc(x_label) << "</text>\n"
    << "<text transform=\"translate(18," << (T + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << esc(y_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i) {
      o << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
    }
    o << "\"/>\n";
    const double ly = T + 16 + 18 * static_cast<double>(s);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 32
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << W - R + 38 << "\" y=\"" << ly << "\">" << esc(series[s].label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

double StatsRow::parameter(const std::string& key) const {
  std::stringstream ss(parameters);
  for (std::string kv; std::getline(ss, kv, ';');) {
    const auto eq = kv.find('=');
    if (eq != std::string::npos && kv.substr(0, eq) == key) {
      try {
        return std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        break;
      }
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<StatsRow> read_stats_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<StatsRow> rows;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty() || line.rfind("method,", 0) == 0) continue;
    const auto c = split_csv(line);
    if (c.size() != 7) throw ParseError(path.string() + ": expected 7 columns", n);
    try {
      rows.push_back({c[0], c[1], std::stod(c[2]), std::stod(c[3]), std::stod(c[4]),
                      std::stod(c[5]), std::stod(c[6])});
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": bad number", n);
    }
  }
  return rows;
}

std::vector<PrPoint> read_pr_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<PrPoint> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty() || line.rfind("recall", 0) == 0) continue;
    const auto c = split_csv(line);
    if (c.size() != 2) throw ParseError(path.string() + ": expected recall,precision", n);
    out.push_back({std::stod(c[0]), std::stod(c[1])});
  }
  return out;
}

std::string render_pr_svg(const std::vector<std::filesystem::path>& files) {
  std::vector<Series> series;
  for (const auto& f : files) {
    Series s{f.stem().string(), {}, {}};
    for (const auto& p : read_pr_csv(f)) {
      s.x.push_back(p.recall);
      s.y.push_back(p.precision);
    }
    series.push_back(std::move(s));
  }
  return render_line_chart("Precision-recall", "Recall", "Precision", series, true);
}

std::vector<std::pair<std::string, std::string>> render_sweeps(const std::vector<StatsRow>& rows,
                                                               const std::string& key) {
  std::map<std::string, std::vector<const StatsRow*>> by_method;
  for (const auto& r : rows) {
    if (!std::isnan(r.parameter(key))) by_method[r.method].push_back(&r);
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& [method, list] : by_method) {
    std::stable_sort(list.begin(), list.end(), [&](const auto* a, const auto* b) {
      return a->parameter(key) < b->parameter(key);
    });
    std::vector<Series> series{{"NN", {}, {}}, {"1-tier", {}, {}}, {"2-tier", {}, {}},
                               {"E-measure", {}, {}}, {"DCG", {}, {}}};
    for (const auto* r : list) {
      const double x = r->parameter(key);
      const double ys[] = {r->nn, r->tier1, r->tier2, r->e_measure, r->dcg};
      for (std::size_t i = 0; i < series.size(); ++i) {
        series[i].x.push_back(x);
        series[i].y.push_back(ys[i]);
      }
    }
    out.emplace_back(method, render_line_chart(method + " vs " + key, key, "Score", series, false));
  }
  return out;
}

}  // namespace shaperet
