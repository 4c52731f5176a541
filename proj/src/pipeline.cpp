#include "shaperet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include <json.hpp>

#include "shaperet/binary_io.hpp"
#include "shaperet/hashing.hpp"
#include "shaperet/keypoints.hpp"
#include "shaperet/mesh_gen.hpp"
#include "shaperet/random.hpp"
#include "shaperet/reduction.hpp"

namespace shaperet {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Describe: return "describe";
    case Stage::Reduce: return "reduce";
    case Stage::Keypoints: return "keypoints";
    case Stage::Dictionary: return "dictionary";
    case Stage::Signatures: return "signatures";
    case Stage::Distmat: return "distmat";
    case Stage::Evaluate: return "evaluate";
  }
  return "?";
}

StageError::StageError(Stage stage, const std::string& mesh_id, const std::string& what)
    : std::runtime_error("[" + std::string(to_string(stage)) + "] " +
                         (mesh_id.empty() ? "" : "mesh '" + mesh_id + "': ") + what),
      stage_(stage),
      mesh_id_(mesh_id) {}

bool RunManifest::all_hits() const {
  return std::all_of(artifacts.begin(), artifacts.end(), [](const auto& a) { return a.hit; });
}

std::size_t RunManifest::misses(Stage s) const {
  return static_cast<std::size_t>(std::count_if(
      artifacts.begin(), artifacts.end(), [&](const auto& a) { return a.stage == s && !a.hit; }));
}

std::string RunManifest::to_json() const {
  json j;
  j["version"] = version;
  json cfg;
  cfg["dataset"] = config.dataset.string();
  cfg["labels"] = config.labels.string();
  std::vector<std::string> kinds;
  for (auto k : config.kinds) kinds.emplace_back(to_string(k));
  cfg["kinds"] = kinds;
  cfg["combination"] = std::string(to_string(config.combination));
  cfg["sampler"] = config.sampler;
  cfg["samples"] = config.samples;
  cfg["dictionary_size"] = config.dictionary_size;
  cfg["seed"] = config.seed;
  cfg["rings"] = config.rings;
  cfg["max_iter"] = config.max_iter;
  cfg["eigen_ratio"] = config.eigen_ratio;
  j["config"] = cfg;
  json arts = json::array();
  for (const auto& a : artifacts) {
    arts.push_back({{"stage", std::string(to_string(a.stage))},
                    {"hash", a.key},
                    {"file", a.file},
                    {"cache_hit", a.hit}});
  }
  j["artifacts"] = arts;
  json times = json::object();
  for (const auto& [s, t] : timings) times[std::string(to_string(s))] = t;
  j["stage_seconds"] = times;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

namespace {

// Bumped when an algorithm change should invalidate cached artifacts.
constexpr std::uint32_t kAlgoVersion = 1;

struct MeshEntry {
  std::string id;
  fs::path path;
  std::string content;  // hash of the file bytes
  std::optional<TriMesh> mesh;
  std::optional<VertexGeometry> geometry;
};

// One dictionary and one histogram half. Two kinds means concatenated vectors.
struct Channel {
  std::string label;
  std::vector<DescriptorKind> kinds;
  std::vector<int> draws;  // keypoint draw per kind
};

class Runner {
 public:
  Runner(const RunConfig& cfg, Stage target, bool upstream)
      : cfg_(cfg), target_(target), upstream_(upstream), cache_(cache_dir(cfg)) {
    manifest_.config = cfg;
  }

  PipelineResult run() {
    PipelineResult result;
    ingest();
    if (target_ == Stage::Ingest) return finish(result);
    if (target_ == Stage::Describe) {
      for (std::size_t i = 0; i < meshes_.size(); ++i) {
        for (auto k : cfg_.kinds) field(i, k);
      }
      return finish(result);
    }
    if (target_ == Stage::Reduce) {
      for (auto k : cfg_.kinds) {
        for (std::size_t i = 0; i < meshes_.size(); ++i) reduced(k, i);
      }
      return finish(result);
    }
    if (target_ == Stage::Keypoints) {
      const fs::path dir = cfg_.out / "keypoints";
      fs::create_directories(dir);
      for (std::size_t i = 0; i < meshes_.size(); ++i) {
        for (int d = 0; d < draws(); ++d) {
          const auto set = keypoints(i, d);
          write_points(set, dir / (meshes_[i].id + (d ? ".b" : "") + ".txt"));
        }
      }
      return finish(result);
    }
    const auto channels = make_channels();
    if (target_ == Stage::Dictionary) {
      for (const auto& ch : channels) dictionary(ch);
      return finish(result);
    }
    const auto [sig_key, sigs] = signatures(channels);
    if (target_ == Stage::Signatures) return finish(result);
    result.matrix = distance_matrix_stage(sig_key, sigs);
    fs::create_directories(cfg_.out);
    write_distance_matrix_csv(*result.matrix, cfg_.out / "distance_matrix.csv");
    write_distance_matrix_bin(*result.matrix, cfg_.out / "distance_matrix.bin");
    if (target_ == Stage::Distmat) return finish(result);
    result.stats = evaluate_stage(*result.matrix);
    write_stats_csv(cfg_.out / "stats.csv", cfg_.method_label(), cfg_.parameter_label(),
                    *result.stats);
    write_pr_csv(cfg_.out / "pr.csv", result.stats->pr_curve);
    write_pr_csv(cfg_.out / "pr_raw.csv", result.stats->pr_raw);
    return finish(result);
  }

 private:
  // ---- bookkeeping ----

  class Timer {
   public:
    Timer(Runner& r, Stage s) : r_(r), s_(s), t0_(std::chrono::steady_clock::now()) {}
    ~Timer() {
      r_.seconds_[s_] +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

   private:
    Runner& r_;
    Stage s_;
    std::chrono::steady_clock::time_point t0_;
  };

  bool allowed(Stage s) const { return upstream_ || s == target_; }

  fs::path artifact(Stage s, const std::string& key, std::string_view ext) {
    const fs::path dir = cache_ / to_string(s);
    fs::create_directories(dir);
    return dir / (key + std::string(ext));
  }

  // True when cached; throws when missing and the stage may not run here.
  bool lookup(Stage s, const std::string& key, const fs::path& file, const std::string& mesh_id,
              const std::string& what) {
    if (fs::exists(file)) {
      record(s, key, file, true);
      return true;
    }
    if (!allowed(s)) {
      throw StageError(s, mesh_id,
                       "missing cached " + what + " (" + key + "); run `shaperet " +
                           std::string(to_string(s)) + "` first");
    }
    return false;
  }

  void record(Stage s, const std::string& key, const fs::path& file, bool hit) {
    if (!recorded_.insert(file.string()).second) return;
    manifest_.artifacts.push_back({s, key, fs::relative(file, cache_).generic_string(), hit});
  }

  PipelineResult& finish(PipelineResult& r) {
    for (auto [s, t] : seconds_) manifest_.timings.emplace_back(s, t);
    fs::create_directories(cfg_.out);
    std::ofstream(cfg_.out / "manifest.json") << manifest_.to_json();
    r.manifest = std::move(manifest_);
    return r;
  }

  template <typename Fn>
  auto guarded(Stage s, const std::string& mesh_id, Fn&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(s, mesh_id, e.what());
    }
  }

  // ---- ingest ----

  void ingest() {
    Timer t(*this, Stage::Ingest);
    std::vector<fs::path> files;
    if (!fs::is_directory(cfg_.dataset)) {
      throw StageError(Stage::Ingest, "", "dataset directory '" + cfg_.dataset.string() +
                                              "' does not exist");
    }
    for (const auto& e : fs::recursive_directory_iterator(cfg_.dataset)) {
      auto ext = e.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (e.is_regular_file() && ext == ".off") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw StageError(Stage::Ingest, "", "no .off files under " + cfg_.dataset.string());
    }
    std::set<std::string> seen;
    for (const auto& f : files) {
      MeshEntry m;
      m.id = f.stem().string();
      m.path = f;
      if (!seen.insert(m.id).second) throw StageError(Stage::Ingest, m.id, "duplicate mesh id");
      m.content = Hasher().file(f).hex16();
      meshes_.push_back(std::move(m));
    }
    std::sort(meshes_.begin(), meshes_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < meshes_.size(); ++i) {
      auto& m = meshes_[i];
      const auto key = Hasher().str("ingest").value(kAlgoVersion).str(m.content).hex16();
      const auto file = artifact(Stage::Ingest, key, ".json");
      if (lookup(Stage::Ingest, key, file, m.id, "mesh summary")) continue;
      const auto& tm = mesh(i);
      json j{{"id", m.id},
             {"vertices", tm.num_vertices()},
             {"faces", tm.num_faces()},
             {"diagonal", bbox(tm).diagonal()}};
      std::ofstream(file) << j.dump() << '\n';
      record(Stage::Ingest, key, file, false);
    }
  }

  const TriMesh& mesh(std::size_t i) {
    auto& m = meshes_[i];
    if (!m.mesh) m.mesh = guarded(Stage::Ingest, m.id, [&] { return read_off(m.path); });
    return *m.mesh;
  }

  const VertexGeometry& geometry(std::size_t i) {
    auto& m = meshes_[i];
    if (!m.geometry) m.geometry = estimate_geometry(mesh(i));
    return *m.geometry;
  }

  // ---- describe ----

  std::string field_key(std::size_t i, DescriptorKind k) const {
    return Hasher()
        .str("describe")
        .value(kAlgoVersion)
        .str(meshes_[i].content)
        .str(to_string(k))
        .value(cfg_.rings)
        .hex16();
  }

  DescriptorField field(std::size_t i, DescriptorKind k) {
    const auto key = field_key(i, k);
    const auto file = artifact(Stage::Describe, key, ".srdf");
    const auto& id = meshes_[i].id;
    if (lookup(Stage::Describe, key, file, id, std::string(to_string(k)) + " descriptor field")) {
      return read_field(file);
    }
    Timer t(*this, Stage::Describe);
    auto fields = guarded(Stage::Describe, id, [&] {
      return compute_fields(cfg_.kinds, mesh(i), geometry(i), cfg_.rings);
    });
    std::optional<DescriptorField> out;
    for (auto& f : fields) {
      const auto fkey = field_key(i, f.kind);
      const auto ffile = artifact(Stage::Describe, fkey, ".srdf");
      write_field(f, ffile);
      record(Stage::Describe, fkey, ffile, false);
      if (f.kind == k) out = std::move(f);
    }
    return std::move(*out);
  }

  // ---- reduce ----

  std::string model_key(DescriptorKind k) {
    if (auto it = model_keys_.find(k); it != model_keys_.end()) return it->second;
    Hasher h;
    h.str("reduce").value(kAlgoVersion).str(to_string(k)).value(cfg_.eigen_ratio);
    for (std::size_t i = 0; i < meshes_.size(); ++i) h.str(field_key(i, k));
    return model_keys_[k] = h.hex16();
  }

  const ReductionModel& model(DescriptorKind k) {
    if (auto it = models_.find(k); it != models_.end()) return it->second;
    const auto key = model_key(k);
    const auto file = artifact(Stage::Reduce, key, ".srrm");
    if (lookup(Stage::Reduce, key, file, "", std::string(to_string(k)) + " reduction model")) {
      return models_[k] = read_model(file);
    }
    // Load upstream outside the timer so describe time is not double counted.
    const PopulationSource source{meshes_.size(),
                                  [&](std::size_t i, RowMatrix& scratch) -> const RowMatrix& {
                                    scratch = field(i, k).values;
                                    return scratch;
                                  }};
    auto m = guarded(Stage::Reduce, "", [&] {
      return fit_reduction(source, std::string(to_string(k)), cfg_.eigen_ratio);
    });
    write_model(m, file);
    record(Stage::Reduce, key, file, false);
    return models_[k] = std::move(m);
  }

  std::string reduced_key(DescriptorKind k, std::size_t i) {
    return Hasher().str("reduced").str(model_key(k)).str(field_key(i, k)).hex16();
  }

  RowMatrix reduced(DescriptorKind k, std::size_t i) {
    const auto key = reduced_key(k, i);
    const auto file = artifact(Stage::Reduce, key, ".srmx");
    if (lookup(Stage::Reduce, key, file, meshes_[i].id,
               "reduced " + std::string(to_string(k)) + " vectors")) {
      return read_matrix(file);
    }
    const auto& m = model(k);
    const auto raw = field(i, k);
    Timer t(*this, Stage::Reduce);
    auto out = apply_reduction(m, raw.values);
    write_matrix(out, std::string(to_string(k)), file);
    record(Stage::Reduce, key, file, false);
    return out;
  }

  // ---- keypoints ----

  int draws() const { return cfg_.different_points() ? 2 : 1; }

  std::uint64_t draw_seed(std::size_t i, int draw) const {
    return derive_seed(cfg_.seed, meshes_[i].id, draw ? "points-b" : "points");
  }

  std::string keypoint_key(std::size_t i, int draw) const {
    Hasher h;
    h.str("keypoints").value(kAlgoVersion).str(meshes_[i].content).str(cfg_.sampler);
    h.value(static_cast<std::uint64_t>(cfg_.samples)).value(draw_seed(i, draw));
    return h.hex16();
  }

  SamplePointSet keypoints(std::size_t i, int draw) {
    const auto key = keypoint_key(i, draw);
    if (auto it = points_.find(key); it != points_.end()) return it->second;
    const auto file = artifact(Stage::Keypoints, key, ".txt");
    const auto& id = meshes_[i].id;
    if (lookup(Stage::Keypoints, key, file, id, cfg_.sampler + " sample points")) {
      return points_[key] = read_points(file);
    }
    Timer t(*this, Stage::Keypoints);
    auto set = guarded(Stage::Keypoints, id, [&] { return sample(i, draw); });
    write_points(set, file);
    record(Stage::Keypoints, key, file, false);
    return points_[key] = std::move(set);
  }

  SamplePointSet sample(std::size_t i, int draw) {
    const auto& m = mesh(i);
    const auto& s = cfg_.sampler;
    if (s == "random") {
      if (cfg_.samples > m.num_vertices()) {
        throw std::invalid_argument("samples = " + std::to_string(cfg_.samples) +
                                    " exceeds the vertex count " +
                                    std::to_string(m.num_vertices()));
      }
      return random_points(m, cfg_.samples, draw_seed(i, draw));
    }
    SamplePointSet set;
    if (s == "mesh-saliency") set = mesh_saliency(m, geometry(i));
    else if (s == "salient-points") set = castellani_points(m);
    else if (s == "harris-adaptive") set = harris3d(m, HarrisParams::adaptive());
    else set = harris3d(m, HarrisParams::rings());
    if (set.indices.empty()) {
      // A detector that finds nothing would leave the mesh without a signature.
      const auto n = std::min<std::size_t>(cfg_.samples, m.num_vertices());
      manifest_.warnings.push_back("mesh '" + m.id() + "': " + s + " found no points; using " +
                                   std::to_string(n) + " random points");
      set = random_points(m, n, draw_seed(i, draw));
      set.method = s + "-fallback-random";
      set.flagged = true;
    }
    return set;
  }

  // ---- dictionary ----

  std::vector<Channel> make_channels() const {
    const auto& k = cfg_.kinds;
    auto name = [](DescriptorKind x) { return std::string(to_string(x)); };
    switch (cfg_.combination) {
      case Combination::None: return {{name(k[0]), {k[0]}, {0}}};
      case Combination::VS: return {{name(k[0]) + "+" + name(k[1]) + "/VS", {k[0], k[1]}, {0, 0}}};
      case Combination::VD: return {{name(k[0]) + "+" + name(k[1]) + "/VD", {k[0], k[1]}, {0, 1}}};
      case Combination::HistS: return {{name(k[0]), {k[0]}, {0}}, {name(k[1]), {k[1]}, {0}}};
      case Combination::HistD: return {{name(k[0]), {k[0]}, {0}}, {name(k[1]), {k[1]}, {1}}};
    }
    return {};
  }

  void channel_inputs(Hasher& h, const Channel& ch, std::size_t i) {
    for (std::size_t c = 0; c < ch.kinds.size(); ++c) {
      h.str(reduced_key(ch.kinds[c], i)).str(keypoint_key(i, ch.draws[c]));
    }
  }

  RowMatrix channel_vectors(const Channel& ch, std::size_t i) {
    const auto pa = keypoints(i, ch.draws[0]);
    const auto ra = reduced(ch.kinds[0], i);
    if (ch.kinds.size() == 1) return gather_rows(ra, pa.indices);
    const auto pb = keypoints(i, ch.draws[1]);
    const auto rb = reduced(ch.kinds[1], i);
    const auto mode = ch.draws[0] == ch.draws[1] ? PointPairing::SamePoints
                                                 : PointPairing::DifferentPoints;
    return guarded(Stage::Dictionary, meshes_[i].id,
                   [&] { return combine_vectors(ra, rb, mode, pa.indices, pb.indices); });
  }

  std::string dictionary_key(const Channel& ch) {
    Hasher h;
    h.str("dictionary").value(kAlgoVersion).str(ch.label);
    h.value(static_cast<std::uint64_t>(cfg_.dictionary_size)).value(cfg_.seed).value(cfg_.max_iter);
    for (std::size_t i = 0; i < meshes_.size(); ++i) channel_inputs(h, ch, i);
    return h.hex16();
  }

  Dictionary dictionary(const Channel& ch) {
    const auto key = dictionary_key(ch);
    const auto file = artifact(Stage::Dictionary, key, ".srdc");
    if (lookup(Stage::Dictionary, key, file, "", ch.label + " dictionary")) {
      return read_dictionary(file);
    }
    std::vector<RowMatrix> parts;
    Eigen::Index rows = 0;
    for (std::size_t i = 0; i < meshes_.size(); ++i) {
      parts.push_back(channel_vectors(ch, i));
      rows += parts.back().rows();
    }
    Timer t(*this, Stage::Dictionary);
    RowMatrix pop(rows, parts.front().cols());
    Eigen::Index at = 0;
    for (const auto& p : parts) {
      pop.middleRows(at, p.rows()) = p;
      at += p.rows();
    }
    auto dict = guarded(Stage::Dictionary, "", [&] {
      return kmeans(pop, static_cast<Eigen::Index>(cfg_.dictionary_size),
                    derive_seed(cfg_.seed, ch.label, "dictionary"), {cfg_.max_iter});
    });
    dict.kind = ch.label;
    write_dictionary(dict, file);
    record(Stage::Dictionary, key, file, false);
    return dict;
  }

  // ---- signatures, matrix, evaluation ----

  std::pair<std::string, std::vector<Signature>> signatures(const std::vector<Channel>& channels) {
    Hasher h;
    h.str("signatures").value(kAlgoVersion);
    for (const auto& ch : channels) h.str(dictionary_key(ch));
    const auto key = h.hex16();
    const auto file = artifact(Stage::Signatures, key, ".srsg");
    if (lookup(Stage::Signatures, key, file, "", "signatures")) return {key, read_signatures(file)};

    std::vector<Dictionary> dicts;
    for (const auto& ch : channels) dicts.push_back(dictionary(ch));
    std::vector<Signature> sigs;
    for (std::size_t i = 0; i < meshes_.size(); ++i) {
      std::vector<RowMatrix> vecs;
      for (const auto& ch : channels) vecs.push_back(channel_vectors(ch, i));
      Timer t(*this, Stage::Signatures);
      sigs.push_back(guarded(Stage::Signatures, meshes_[i].id, [&] {
        auto s = build_signature(meshes_[i].id, vecs[0], dicts[0]);
        for (std::size_t c = 1; c < dicts.size(); ++c) {
          s = combine_histograms(s, build_signature(meshes_[i].id, vecs[c], dicts[c]));
        }
        return s;
      }));
    }
    write_signatures(sigs, file);
    record(Stage::Signatures, key, file, false);
    return {key, std::move(sigs)};
  }

  DistanceMatrix distance_matrix_stage(const std::string& sig_key, const std::vector<Signature>& sigs) {
    const auto key = Hasher().str("distmat").value(kAlgoVersion).str(sig_key).hex16();
    distmat_key_ = key;
    const auto file = artifact(Stage::Distmat, key, ".srdm");
    if (lookup(Stage::Distmat, key, file, "", "distance matrix")) return read_distance_matrix_bin(file);
    Timer t(*this, Stage::Distmat);
    auto dm = distance_matrix(sigs);
    write_distance_matrix_bin(dm, file);
    write_distance_matrix_csv(dm, artifact(Stage::Distmat, key, ".csv"));
    record(Stage::Distmat, key, file, false);
    return dm;
  }

  RetrievalStats evaluate_stage(const DistanceMatrix& dm) {
    if (cfg_.labels.empty()) throw StageError(Stage::Evaluate, "", "no labels file configured");
    const auto key = Hasher()
                         .str("evaluate")
                         .value(kAlgoVersion)
                         .str(distmat_key_)
                         .file(cfg_.labels)
                         .hex16();
    const auto file = artifact(Stage::Evaluate, key, ".json");
    if (lookup(Stage::Evaluate, key, file, "", "retrieval statistics")) {
      std::ifstream in(file);
      return stats_from_json(json::parse(in));
    }
    Timer t(*this, Stage::Evaluate);
    const auto labels = guarded(Stage::Evaluate, "", [&] { return read_labels(cfg_.labels); });
    auto stats = guarded(Stage::Evaluate, "", [&] { return evaluate(dm, labels); });
    if (stats.skipped) {
      manifest_.warnings.push_back(std::to_string(stats.skipped) +
                                   " singleton-class queries skipped for NN/tiers/E/PR");
    }
    std::ofstream(file) << stats_to_json(stats).dump() << '\n';
    record(Stage::Evaluate, key, file, false);
    return stats;
  }

  static json curve_json(const std::vector<PrPoint>& c) {
    json a = json::array();
    for (const auto& p : c) a.push_back({p.recall, p.precision});
    return a;
  }
  static std::vector<PrPoint> curve_from(const json& a) {
    std::vector<PrPoint> c;
    for (const auto& p : a) c.push_back({p[0].get<double>(), p[1].get<double>()});
    return c;
  }
  static json stats_to_json(const RetrievalStats& s) {
    return {{"nn", s.nn},           {"tier1", s.tier1},     {"tier2", s.tier2},
            {"e_measure", s.e_measure}, {"dcg", s.dcg},     {"queries", s.queries},
            {"skipped", s.skipped}, {"pr_curve", curve_json(s.pr_curve)},
            {"pr_raw", curve_json(s.pr_raw)}};
  }
  static RetrievalStats stats_from_json(const json& j) {
    RetrievalStats s;
    s.nn = j.at("nn");
    s.tier1 = j.at("tier1");
    s.tier2 = j.at("tier2");
    s.e_measure = j.at("e_measure");
    s.dcg = j.at("dcg");
    s.queries = j.at("queries");
    s.skipped = j.at("skipped");
    s.pr_curve = curve_from(j.at("pr_curve"));
    s.pr_raw = curve_from(j.at("pr_raw"));
    return s;
  }

  const RunConfig& cfg_;
  Stage target_;
  bool upstream_;
  fs::path cache_;
  RunManifest manifest_;
  std::vector<MeshEntry> meshes_;
  std::map<DescriptorKind, std::string> model_keys_;
  std::map<DescriptorKind, ReductionModel> models_;
  std::map<std::string, SamplePointSet> points_;
  std::set<std::string> recorded_;
  std::map<Stage, double> seconds_;
  std::string distmat_key_;
};

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, Stage target, bool compute_upstream) {
  validate(config, true);
  ThreadCountGuard threads(config.threads);
  return Runner(config, target, compute_upstream).run();
}

fs::path write_toy_dataset(const fs::path& dir, std::uint64_t seed) {
  const fs::path meshes = dir / "meshes";
  fs::create_directories(meshes);
  Rng rng(seed);
  auto vary = [&](double spread) { return 1.0 + spread * (2.0 * rng.uniform() - 1.0); };
  std::string cla = "PSB 1\n3 18\n";
  const char* classes[] = {"sphere", "ellipsoid", "torus"};
  for (int c = 0; c < 3; ++c) {
    cla += std::string("\n") + classes[c] + " 0 6\n";
    for (int k = 0; k < 6; ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "%s_%02d", classes[c], k);
      TriMesh base;
      if (c == 0) base = gen::icosphere(vary(0.15), 3, id);
      if (c == 1) base = gen::ellipsoid(Vec3(1.6 * vary(0.1), 1.0 * vary(0.1), 0.6 * vary(0.1)), 3, id);
      if (c == 2) base = gen::torus(1.0, 0.35 * vary(0.15), 48, 16, id);
      const Eigen::Affine3d xf(Eigen::AngleAxisd(2.0 * std::numbers::pi * rng.uniform(), rng.unit_vector()));
      const auto moved = gen::transformed(base, xf);
      const double amp = 0.004 * bbox(moved).diagonal();
      write_off(gen::jittered(moved, amp, rng.next()), meshes / (std::string(id) + ".off"));
      cla += std::string(id) + "\n";
    }
  }
  std::ofstream(dir / "toy.cla") << cla;
  const fs::path conf = dir / "toy.conf";
  std::ofstream(conf) << "# bundled toy benchmark\n"
                         "dataset = meshes\n"
                         "labels = toy.cla\n"
                         "kinds = Mean\n"
                         "sampler = random\n"
                         "samples = 200\n"
                         "dictionary_size = 50\n"
                         "seed = 7\n"
                         "out = out\n";
  return conf;
}

}  // namespace shaperet
