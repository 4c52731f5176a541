#include "shaperet/binary_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "shaperet/mesh.hpp"

static_assert(std::endian::native == std::endian::little, "little-endian host required");

namespace shaperet {

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  Writer(const std::filesystem::path& path, const char (&magic)[5])
      : path_(path), tmp_(path.string() + ".tmp"), out_(tmp_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_.write(magic, 4);
    u32(kVersion);
  }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  template <typename M>
  void matrix(const M& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  void vector(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  }
  // Write-then-rename so a crash never leaves a truncated cache entry.
  void commit() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed for " + path_.string());
    std::filesystem::rename(tmp_, path_);
  }

 private:
  void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  std::filesystem::path path_, tmp_;
  std::ofstream out_;
};

class Reader {
 public:
  Reader(const std::filesystem::path& path, const char (&magic)[5]) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
    char m[4];
    raw(m, 4);
    if (std::memcmp(m, magic, 4) != 0) fail("bad magic, expected " + std::string(magic, 4));
    if (const auto v = u32(); v != kVersion) fail("unsupported version " + std::to_string(v));
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  std::string str() {
    std::string s(u32(), '\0');
    raw(s.data(), s.size());
    return s;
  }
  RowMatrix matrix() {
    const auto rows = u64(), cols = u64();
    check_size(rows * cols);
    RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    raw(m.data(), sizeof(double) * rows * cols);
    return m;
  }
  Eigen::VectorXd vector() {
    const auto n = u64();
    check_size(n);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    raw(v.data(), sizeof(double) * n);
    return v;
  }
  void finish() {
    if (in_.peek() != std::char_traits<char>::eof()) fail("trailing bytes");
  }
  [[noreturn]] void fail(const std::string& what) {
    throw FormatError(path_.string() + ": " + what);
  }

 private:
  void check_size(std::uint64_t n) {
    if (n > (std::uint64_t{1} << 36)) fail("implausible element count");
  }
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("truncated file");
  }
  std::filesystem::path path_;
  std::ifstream in_;
};

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_field(const DescriptorField& f, const std::filesystem::path& path) {
  Writer w(path, "SRDF");
  w.str(f.mesh_id);
  w.str(std::string(to_string(f.kind)));
  w.matrix(f.values);
  w.commit();
}

DescriptorField read_field(const std::filesystem::path& path) {
  Reader r(path, "SRDF");
  DescriptorField f;
  f.mesh_id = r.str();
  f.kind = parse_kind(r.str());
  f.values = r.matrix();
  r.finish();
  return f;
}

void write_model(const ReductionModel& m, const std::filesystem::path& path) {
  Writer w(path, "SRRM");
  w.str(m.kind);
  w.vector(m.mean);
  w.matrix(m.basis);
  w.vector(m.eigenvalues);
  w.vector(m.lo);
  w.vector(m.hi);
  w.commit();
}

ReductionModel read_model(const std::filesystem::path& path) {
  Reader r(path, "SRRM");
  ReductionModel m;
  m.kind = r.str();
  m.mean = r.vector();
  m.basis = r.matrix();
  m.eigenvalues = r.vector();
  m.lo = r.vector();
  m.hi = r.vector();
  r.finish();
  if (m.basis.rows() != m.mean.size() || m.lo.size() != m.basis.cols() ||
      m.hi.size() != m.basis.cols()) {
    r.fail("inconsistent reduction model shapes");
  }
  return m;
}

void write_dictionary(const Dictionary& d, const std::filesystem::path& path) {
  Writer w(path, "SRDC");
  w.str(d.kind);
  w.u64(static_cast<std::uint64_t>(d.size()));
  w.u64(static_cast<std::uint64_t>(d.dim()));
  w.u64(d.seed);
  for (Eigen::Index i = 0; i < d.centers.size(); ++i) w.f64(d.centers.data()[i]);
  w.u32(static_cast<std::uint32_t>(d.iterations));
  w.f64(d.objective);
  w.vector(Eigen::Map<const Eigen::VectorXd>(d.objective_history.data(),
                                             static_cast<Eigen::Index>(d.objective_history.size())));
  w.commit();
}

Dictionary read_dictionary(const std::filesystem::path& path) {
  Reader r(path, "SRDC");
  Dictionary d;
  d.kind = r.str();
  const auto n = r.u64(), dim = r.u64();
  d.seed = r.u64();
  if (n * dim > (std::uint64_t{1} << 36)) r.fail("implausible dictionary size");
  d.centers.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < d.centers.size(); ++i) d.centers.data()[i] = r.f64();
  d.iterations = static_cast<int>(r.u32());
  d.objective = r.f64();
  const auto hist = r.vector();
  d.objective_history.assign(hist.data(), hist.data() + hist.size());
  r.finish();
  return d;
}

void write_matrix(const RowMatrix& m, const std::string& tag, const std::filesystem::path& path) {
  Writer w(path, "SRMX");
  w.str(tag);
  w.matrix(m);
  w.commit();
}

RowMatrix read_matrix(const std::filesystem::path& path, std::string* tag) {
  Reader r(path, "SRMX");
  auto t = r.str();
  auto m = r.matrix();
  r.finish();
  if (tag) *tag = std::move(t);
  return m;
}

void write_signatures(const std::vector<Signature>& sigs, const std::filesystem::path& path) {
  Writer w(path, "SRSG");
  w.u64(sigs.size());
  for (const auto& s : sigs) {
    w.str(s.mesh_id);
    w.u64(s.samples);
    w.vector(s.histogram);
  }
  w.commit();
}

std::vector<Signature> read_signatures(const std::filesystem::path& path) {
  Reader r(path, "SRSG");
  std::vector<Signature> out(r.u64());
  for (auto& s : out) {
    s.mesh_id = r.str();
    s.samples = r.u64();
    s.histogram = r.vector();
  }
  r.finish();
  return out;
}

void write_distance_matrix_bin(const DistanceMatrix& dm, const std::filesystem::path& path) {
  Writer w(path, "SRDM");
  w.u64(dm.size());
  for (const auto& id : dm.ids) w.str(id);
  w.matrix(dm.values);
  w.commit();
}

DistanceMatrix read_distance_matrix_bin(const std::filesystem::path& path) {
  Reader r(path, "SRDM");
  DistanceMatrix dm;
  dm.ids.resize(r.u64());
  for (auto& id : dm.ids) id = r.str();
  dm.values = r.matrix();
  r.finish();
  if (dm.values.rows() != static_cast<Eigen::Index>(dm.size()) ||
      dm.values.cols() != static_cast<Eigen::Index>(dm.size())) {
    r.fail("matrix shape does not match id count");
  }
  return dm;
}

std::string serialize_distance_matrix_csv(const DistanceMatrix& dm) {
  std::string out;
  for (const auto& id : dm.ids) out += "," + id;
  out += '\n';
  for (std::size_t i = 0; i < dm.size(); ++i) {
    out += dm.ids[i];
    for (std::size_t j = 0; j < dm.size(); ++j) {
      out += ',' + fmt17(dm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  return out;
}

DistanceMatrix parse_distance_matrix_csv(std::string_view text) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      auto cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(std::move(cell));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  DistanceMatrix dm;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (dm.ids.empty()) {
      if (cells.size() < 2) throw ParseError("header needs at least one id", n);
      dm.ids.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != dm.ids.size() + 1) throw ParseError("wrong number of cells", n);
    if (cells[0] != dm.ids[rows.size()]) {
      throw ParseError("row id '" + cells[0] + "' does not match column order", n);
    }
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      double v = 0;
      const auto& c = cells[j];
      const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || p != c.data() + c.size() || !std::isfinite(v)) {
        throw ParseError("bad number '" + c + "'", n);
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (dm.ids.empty()) throw ParseError("empty distance matrix", 0);
  if (rows.size() != dm.ids.size()) throw ParseError("row count does not match id count", n);
  const auto m = static_cast<Eigen::Index>(dm.size());
  dm.values.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) dm.values(i, j) = rows[i][j];
  }
  return dm;
}

void write_distance_matrix_csv(const DistanceMatrix& dm, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_distance_matrix_csv(dm);
}

DistanceMatrix read_distance_matrix(const std::filesystem::path& path) {
  const auto text = read_text(path);
  if (text.rfind("SRDM", 0) == 0) return read_distance_matrix_bin(path);
  try {
    return parse_distance_matrix_csv(text);
  } catch (const ParseError& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace shaperet
