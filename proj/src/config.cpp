#include "shaperet/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "shaperet/mesh.hpp"

namespace shaperet {

namespace {

constexpr std::array<std::string_view, 5> kSamplers{"random", "mesh-saliency", "salient-points",
                                                    "harris-adaptive", "harris-rings"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(" \t\r") - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw std::invalid_argument("invalid value '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

}  // namespace

std::string_view to_string(Combination c) {
  switch (c) {
    case Combination::None: return "none";
    case Combination::VS: return "VS";
    case Combination::VD: return "VD";
    case Combination::HistS: return "HistS";
    case Combination::HistD: return "HistD";
  }
  return "?";
}

Combination parse_combination(std::string_view name) {
  for (auto c : {Combination::None, Combination::VS, Combination::VD, Combination::HistS,
                 Combination::HistD}) {
    std::string a(to_string(c)), b(name);
    auto lower = [](std::string& s) {
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    };
    lower(a);
    lower(b);
    if (a == b) return c;
  }
  throw std::invalid_argument("unknown combination '" + std::string(name) +
                              "' (expected none, VS, VD, HistS or HistD)");
}

bool is_known_sampler(std::string_view name) {
  return std::find(kSamplers.begin(), kSamplers.end(), name) != kSamplers.end();
}

std::string RunConfig::method_label() const {
  std::string s;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i) s += '+';
    s += to_string(kinds[i]);
  }
  if (combination != Combination::None) s += "/" + std::string(to_string(combination));
  return s;
}

std::string RunConfig::parameter_label() const {
  std::ostringstream s;
  s << "sampler=" << sampler;
  if (sampler == "random") s << ";n=" << samples;
  s << ";D=" << dictionary_size << ";seed=" << seed;
  return s.str();
}

void apply_setting(RunConfig& cfg, std::string_view key_in, std::string_view value_in) {
  const auto key = trim(key_in);
  const auto value = trim(value_in);
  if (key == "dataset") cfg.dataset = value;
  else if (key == "labels") cfg.labels = value;
  else if (key == "kinds" || key == "kind") {
    cfg.kinds.clear();
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      const auto tok = trim(std::string_view(value).substr(start, comma - start));
      if (!tok.empty()) cfg.kinds.push_back(parse_kind(tok));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } else if (key == "combination") cfg.combination = parse_combination(value);
  else if (key == "sampler") {
    if (!is_known_sampler(value)) {
      throw std::invalid_argument("unknown sampler '" + value +
                                  "' (expected random, mesh-saliency, salient-points, "
                                  "harris-adaptive or harris-rings)");
    }
    cfg.sampler = value;
  } else if (key == "samples") cfg.samples = parse_number<std::size_t>(key, value);
  else if (key == "dictionary_size") cfg.dictionary_size = parse_number<std::size_t>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "rings") cfg.rings = parse_number<int>(key, value);
  else if (key == "max_iter") cfg.max_iter = parse_number<int>(key, value);
  else if (key == "eigen_ratio") cfg.eigen_ratio = parse_number<double>(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "cache") cfg.cache = value;
  else if (key == "threads") cfg.threads = parse_number<int>(key, value);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

RunConfig parse_config(std::string_view text, RunConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string raw;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", n);
    try {
      apply_setting(cfg, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), n);
    }
  }
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig cfg;
  try {
    cfg = parse_config(buf.str(), std::move(base));
  } catch (const ParseError& e) {
    throw e.with_context(path.string());
  }
  // Relative paths in a config file are relative to the file.
  const auto dir = path.parent_path();
  for (auto* p : {&cfg.dataset, &cfg.labels, &cfg.out, &cfg.cache}) {
    if (!p->empty() && p->is_relative()) *p = dir / *p;
  }
  return cfg;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream s;
  s << "dataset = " << c.dataset.string() << '\n'
    << "labels = " << c.labels.string() << '\n'
    << "kinds = ";
  for (std::size_t i = 0; i < c.kinds.size(); ++i) s << (i ? "," : "") << to_string(c.kinds[i]);
  s << "\ncombination = " << to_string(c.combination) << '\n'
    << "sampler = " << c.sampler << '\n'
    << "samples = " << c.samples << '\n'
    << "dictionary_size = " << c.dictionary_size << '\n'
    << "seed = " << c.seed << '\n'
    << "rings = " << c.rings << '\n'
    << "max_iter = " << c.max_iter << '\n'
    << "eigen_ratio = " << c.eigen_ratio << '\n'
    << "out = " << c.out.string() << '\n';
  if (!c.cache.empty()) s << "cache = " << c.cache.string() << '\n';
  if (c.threads) s << "threads = " << c.threads << '\n';
  return s.str();
}

void validate(const RunConfig& c, bool check_paths) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  if (c.samples < 1) fail("samples must be at least 1");
  if (c.dictionary_size < 1) fail("dictionary_size must be at least 1");
  if (c.rings < 1) fail("rings must be at least 1");
  if (c.max_iter < 1) fail("max_iter must be at least 1");
  if (!(c.eigen_ratio > 0.0 && c.eigen_ratio <= 1.0)) fail("eigen_ratio must lie in (0, 1]");
  if (c.kinds.empty()) fail("at least one descriptor kind is required");
  if (c.combination == Combination::None && c.kinds.size() != 1) {
    fail("exactly one kind is required without a combination mode");
  }
  if (c.combination != Combination::None && c.kinds.size() != 2) {
    fail("combination " + std::string(to_string(c.combination)) + " requires exactly two kinds");
  }
  if (c.different_points() && c.sampler != "random") {
    fail("combination " + std::string(to_string(c.combination)) +
         " draws independent point sets and needs sampler = random");
  }
  if (check_paths) {
    if (c.dataset.empty() || !std::filesystem::is_directory(c.dataset)) {
      fail("dataset directory '" + c.dataset.string() + "' does not exist");
    }
    if (!c.labels.empty() && !std::filesystem::is_regular_file(c.labels)) {
      fail("labels file '" + c.labels.string() + "' does not exist");
    }
  }
}

std::filesystem::path cache_dir(const RunConfig& cfg) {
  if (!cfg.cache.empty()) return cfg.cache;
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return cfg.out / "cache";
}

}  // namespace shaperet
