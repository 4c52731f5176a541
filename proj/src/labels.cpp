#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "shaperet/mesh.hpp"
#include "shaperet/retrieval_eval.hpp"

namespace shaperet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::size_t to_count(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v < 0) throw ParseError("expected a count, got '" + tok + "'", line);
  return static_cast<std::size_t>(v);
}

}  // namespace

const std::string& Labeling::lookup(std::string_view id) const {
  if (auto it = class_of.find(std::string(id)); it != class_of.end()) return it->second;
  std::size_t k = 0;
  while (k < id.size() && !std::isdigit(static_cast<unsigned char>(id[k]))) ++k;
  if (k > 0 && k < id.size()) {
    if (auto it = class_of.find(std::string(id.substr(k))); it != class_of.end()) {
      return it->second;
    }
  }
  throw std::invalid_argument("mesh '" + std::string(id) + "' has no class label");
}

Labeling parse_cla(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::string raw;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    auto toks = split_ws(raw);
    if (!toks.empty()) lines.emplace_back(n, std::move(toks));
  }
  if (lines.empty() || lines[0].second[0] != "PSB") {
    throw ParseError("missing PSB header", lines.empty() ? 1 : lines[0].first);
  }
  if (lines.size() < 2 || lines[1].second.size() != 2) {
    throw ParseError("expected '<classes> <models>' line", lines.size() < 2 ? 2 : lines[1].first);
  }
  const auto n_classes = to_count(lines[1].second[0], lines[1].first);
  const auto n_models = to_count(lines[1].second[1], lines[1].first);

  Labeling out;
  std::size_t pos = 2, classes = 0, models = 0;
  while (pos < lines.size()) {
    const auto& [line, toks] = lines[pos++];
    if (toks.size() != 3) throw ParseError("expected '<class> <parent> <count>'", line);
    const auto count = to_count(toks[2], line);
    ++classes;
    for (std::size_t i = 0; i < count; ++i) {
      if (pos >= lines.size()) throw ParseError("class '" + toks[0] + "' lists too few models", line);
      const auto& [mline, mtoks] = lines[pos++];
      if (mtoks.size() != 1) throw ParseError("expected a model id", mline);
      if (!out.class_of.emplace(mtoks[0], toks[0]).second) {
        throw ParseError("model '" + mtoks[0] + "' listed twice", mline);
      }
      ++models;
    }
  }
  if (classes != n_classes) {
    throw ParseError("count mismatch: header declares " + std::to_string(n_classes) +
                         " classes, found " + std::to_string(classes),
                     lines[1].first);
  }
  if (models != n_models) {
    throw ParseError("count mismatch: header declares " + std::to_string(n_models) +
                         " models, found " + std::to_string(models),
                     lines[1].first);
  }
  return out;
}

Labeling parse_label_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  Labeling out;
  std::string raw;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const auto line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'id,class'", n);
    const auto id = trim(std::string_view(line).substr(0, comma));
    const auto cls = trim(std::string_view(line).substr(comma + 1));
    if (id.empty() || cls.empty()) throw ParseError("empty id or class", n);
    if (out.class_of.empty() && id == "id" && cls == "class") continue;
    if (!out.class_of.emplace(id, cls).second) throw ParseError("id '" + id + "' listed twice", n);
  }
  return out;
}

Labeling parse_labels(std::string_view text) {
  const auto first = trim(text.substr(0, std::min<std::size_t>(text.size(), 16)));
  if (first.rfind("PSB", 0) == 0) return parse_cla(text);
  return parse_label_csv(text);
}

Labeling read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_labels(buf.str());
  } catch (const ParseError& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace shaperet
