#include <charconv>
#include <fstream>
#include <sstream>

#include "shaperet/mesh.hpp"

namespace shaperet {

namespace {

// Yields whitespace-separated tokens of non-blank, non-comment lines.
class OffLines {
 public:
  explicit OffLines(std::string_view text) : text_(text) {}

  // Advances to the next meaningful line; false at end of input.
  bool next(std::vector<std::string_view>& tokens) {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      tokens.clear();
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::size_t line() const { return line_no_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(tok) + "'", line);
  }
  return value;
}

}  // namespace

TriMesh parse_off(std::string_view text, std::string id) {
  OffLines lines(text);
  std::vector<std::string_view> tok;
  if (!lines.next(tok)) throw ParseError("missing OFF header", 1);

  // The counts may share the header line ("OFF 8 12 0").
  if (tok[0] != "OFF") {
    if (tok[0].find("OFF") != std::string_view::npos) {
      throw ParseError("unsupported OFF variant '" + std::string(tok[0]) + "' (ASCII OFF only)",
                       lines.line());
    }
    throw ParseError("missing OFF header", lines.line());
  }
  std::vector<std::string_view> counts(tok.begin() + 1, tok.end());
  if (counts.empty()) {
    if (!lines.next(tok)) throw ParseError("missing counts line", lines.line());
    counts = tok;
  }
  if (counts.size() < 2) throw ParseError("counts line needs vertex and face counts", lines.line());
  const auto nv = parse_number<std::size_t>(counts[0], lines.line(), "vertex count");
  const auto nf = parse_number<std::size_t>(counts[1], lines.line(), "face count");

  std::vector<Vec3> vertices;
  vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!lines.next(tok)) {
      throw ParseError("count mismatch: expected " + std::to_string(nv) + " vertices, found " +
                           std::to_string(i),
                       lines.line());
    }
    if (tok.size() < 3) throw ParseError("vertex line needs 3 coordinates", lines.line());
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = parse_number<double>(tok[k], lines.line(), "coordinate");
    if (!p.allFinite()) throw ParseError("non-finite vertex coordinate", lines.line());
    vertices.push_back(p);
  }

  std::vector<Face> faces;
  faces.reserve(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    if (!lines.next(tok)) {
      throw ParseError("count mismatch: expected " + std::to_string(nf) + " faces, found " +
                           std::to_string(i),
                       lines.line());
    }
    const auto arity = parse_number<std::size_t>(tok[0], lines.line(), "face arity");
    if (arity != 3) throw ParseError("non-triangular face", lines.line());
    if (tok.size() < 4) throw ParseError("face line needs 3 indices", lines.line());
    Face f{};
    for (int k = 0; k < 3; ++k) {
      const auto idx = parse_number<long long>(tok[k + 1], lines.line(), "vertex index");
      if (idx < 0 || static_cast<std::size_t>(idx) >= nv) {
        throw ParseError("face index " + std::to_string(idx) + " out of range", lines.line());
      }
      f[k] = static_cast<Index>(idx);
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      throw ParseError("degenerate face", lines.line());
    }
    faces.push_back(f);
  }
  if (lines.next(tok)) {
    throw ParseError("count mismatch: unexpected data after declared elements", lines.line());
  }
  return TriMesh(std::move(id), std::move(vertices), std::move(faces));
}

TriMesh read_off(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_off(buf.str(), path.stem().string());
  } catch (const ParseError& e) {
    throw e.with_context(path.string());
  }
}

std::string serialize_off(const TriMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  return out.str();
}

void write_off(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshError("cannot write " + path.string());
  out << serialize_off(mesh);
}

}  // namespace shaperet
