#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "shaperet/config.hpp"
#include "shaperet/mesh_gen.hpp"
#include "shaperet/pipeline.hpp"

using namespace shaperet;
namespace fs = std::filesystem;

namespace {

struct Toy {
  fs::path root;
  RunConfig cfg;
  explicit Toy(const std::string& name) {
    root = fs::temp_directory_path() / ("shaperet_pipe_" + name);
    fs::remove_all(root);
    cfg = read_config(write_toy_dataset(root));
  }
  ~Toy() { fs::remove_all(root); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto cfg = parse_config(
      "# sweep\ndataset = /tmp\nkinds = Mean, SI\ncombination = HistS\nsampler = harris-rings\n"
      "samples = 50\ndictionary_size = 10\nseed = 3\n");
  CHECK(cfg.kinds.size() == 2);
  CHECK(cfg.combination == Combination::HistS);
  CHECK(cfg.dictionary_size == 10);
  CHECK(cfg.method_label() == "Mean+SI/HistS");
  CHECK_NOTHROW(validate(cfg, false));
  CHECK(parse_config(serialize_config(cfg)).method_label() == cfg.method_label());

  auto one = cfg;
  one.combination = Combination::VS;
  one.kinds = {DescriptorKind::Mean};
  CHECK_THROWS(validate(one, false));
  auto vd = cfg;
  vd.combination = Combination::VD;
  CHECK_THROWS(validate(vd, false));  // different points need the random sampler
  vd.sampler = "random";
  CHECK_NOTHROW(validate(vd, false));

  CHECK_THROWS_AS(parse_config("colour = red\n"), ParseError);
  CHECK_THROWS(parse_config("samples = many\n"));
  CHECK_THROWS(parse_config("sampler = sift\n"));
  CHECK_THROWS(parse_config("just a line\n"));
  RunConfig missing;
  missing.dataset = "/nonexistent/shaperet";
  CHECK_THROWS(validate(missing, true));
}

TEST_CASE("toy run: outputs, cache hits and determinism") {
  Toy toy("run");
  const auto first = run_pipeline(toy.cfg);
  REQUIRE(first.matrix);
  REQUIRE(first.stats);
  CHECK(first.matrix->size() == 18);
  CHECK(first.stats->nn >= 0.9);
  CHECK(first.stats->tier1 >= 0.8);
  for (const char* f : {"distance_matrix.csv", "stats.csv", "pr.csv", "manifest.json"}) {
    CHECK(fs::exists(toy.cfg.out / f));
  }
  CHECK_FALSE(first.manifest.all_hits());
  const auto stats_bytes = slurp(toy.cfg.out / "stats.csv");

  const auto second = run_pipeline(toy.cfg);
  CHECK(second.manifest.all_hits());
  CHECK(second.matrix->values == first.matrix->values);
  CHECK(slurp(toy.cfg.out / "stats.csv") == stats_bytes);

  // Fresh cache, other thread counts: byte-identical statistics.
  for (int threads : {1, 3}) {
    auto cfg = toy.cfg;
    cfg.threads = threads;
    cfg.cache = toy.root / ("cache_t" + std::to_string(threads));
    cfg.out = toy.root / ("out_t" + std::to_string(threads));
    const auto r = run_pipeline(cfg);
    CHECK_FALSE(r.manifest.all_hits());
    CHECK(slurp(cfg.out / "stats.csv") == stats_bytes);
    CHECK(r.matrix->values == first.matrix->values);
  }
}

TEST_CASE("editing one mesh invalidates only what depends on it") {
  Toy toy("edit");
  run_pipeline(toy.cfg);
  const auto path = toy.cfg.dataset / "torus_03.off";
  REQUIRE(fs::exists(path));
  write_off(gen::jittered(read_off(path), 1e-3, 5), path);

  const auto r = run_pipeline(toy.cfg);
  const auto& m = r.manifest;
  CHECK(m.misses(Stage::Ingest) == 1);
  CHECK(m.misses(Stage::Describe) == 1);
  CHECK(m.misses(Stage::Keypoints) == 1);
  std::size_t ingest_hits = 0, describe_hits = 0;
  for (const auto& a : m.artifacts) {
    ingest_hits += a.stage == Stage::Ingest && a.hit;
    describe_hits += a.stage == Stage::Describe && a.hit;
  }
  CHECK(ingest_hits == 17);
  CHECK(describe_hits == 17);
  // The reduction model spans the dataset, so everything downstream is redone.
  CHECK(m.misses(Stage::Reduce) == 19);
  CHECK(m.misses(Stage::Dictionary) == 1);
  CHECK(m.misses(Stage::Signatures) >= 1);
  CHECK(m.misses(Stage::Distmat) == 1);
}

TEST_CASE("stage subcommands need their prerequisites") {
  Toy toy("stages");
  try {
    run_pipeline(toy.cfg, Stage::Dictionary, false);
    FAIL("expected a missing-prerequisite error");
  } catch (const StageError& e) {
    const std::string what = e.what();
    CHECK(what.find("run `shaperet") != std::string::npos);
  }
  // Running the stages one at a time matches a single full run.
  for (Stage s : {Stage::Ingest, Stage::Describe, Stage::Reduce, Stage::Keypoints,
                  Stage::Dictionary, Stage::Signatures, Stage::Distmat}) {
    run_pipeline(toy.cfg, s, false);
  }
  const auto staged = run_pipeline(toy.cfg, Stage::Evaluate, false);
  CHECK(staged.manifest.misses(Stage::Distmat) == 0);
  auto fresh = toy.cfg;
  fresh.cache = toy.root / "fresh-cache";
  fresh.out = toy.root / "fresh-out";
  const auto full = run_pipeline(fresh);
  CHECK(staged.matrix->values == full.matrix->values);
  CHECK(staged.stats->dcg == full.stats->dcg);
}

TEST_CASE("stage errors name the stage and mesh") {
  Toy toy("errors");
  std::ofstream(toy.cfg.dataset / "broken.off") << "OFF\n3 1 0\n0 0 0\n1 0 0\n";
  try {
    run_pipeline(toy.cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Ingest);
    CHECK(e.mesh_id() == "broken");
  }
}
