// shaperet command-line driver.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "shaperet/binary_io.hpp"
#include "shaperet/config.hpp"
#include "shaperet/pipeline.hpp"
#include "shaperet/retrieval_eval.hpp"
#include "shaperet/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace shaperet;

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out, cache;
  std::vector<std::string> settings;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_config) {
  auto* opt = cmd->add_option("--config", a.config, "key = value run configuration");
  if (need_config) opt->required();
  cmd->add_option("--seed", a.seed, "master seed (overrides the config)");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--cache", a.cache, std::string("cache directory (default: $") + kCacheEnv +
                                          " or <out>/cache)");
  cmd->add_option("--set", a.settings, "extra key=value override, repeatable");
  cmd->add_option("--threads", a.threads, "OpenMP worker count (0 = default)");
}

RunConfig load(const CommonArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : read_config(a.config);
  for (const auto& kv : a.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.seed) cfg.seed = *a.seed;
  if (!a.out.empty()) cfg.out = a.out;
  if (!a.cache.empty()) cfg.cache = a.cache;
  if (a.threads) cfg.threads = a.threads;
  return cfg;
}

void report(const PipelineResult& r) {
  const auto& m = r.manifest;
  std::size_t hits = 0;
  for (const auto& a : m.artifacts) hits += a.hit;
  std::fprintf(stderr, "artifacts: %zu (%zu cached)\n", m.artifacts.size(), hits);
  for (const auto& w : m.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (r.stats) {
    const auto& s = *r.stats;
    std::printf("nn=%.4f tier1=%.4f tier2=%.4f e=%.4f dcg=%.4f\n", s.nn, s.tier1, s.tier2,
                s.e_measure, s.dcg);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bag-of-words 3D shape retrieval toolkit"};
  app.set_version_flag("--version", SHAPERET_VERSION);
  app.require_subcommand(1);

  CommonArgs common;
  struct StageCmd {
    const char* name;
    Stage stage;
    const char* help;
  };
  const StageCmd stage_cmds[] = {
      {"ingest", Stage::Ingest, "parse and validate the dataset meshes"},
      {"describe", Stage::Describe, "compute raw descriptor fields at every vertex"},
      {"reduce", Stage::Reduce, "fit the PCA reduction and project every field"},
      {"keypoints", Stage::Keypoints, "select sample points on every mesh"},
      {"dictionary", Stage::Dictionary, "cluster sample vectors into visual words"},
      {"signatures", Stage::Signatures, "build per-mesh word histograms"},
      {"distmat", Stage::Distmat, "compute the pairwise distance matrix"},
  };
  std::map<CLI::App*, Stage> stage_of;
  std::string method;
  for (const auto& c : stage_cmds) {
    auto* cmd = app.add_subcommand(c.name, c.help);
    add_common(cmd, common, true);
    if (c.stage == Stage::Keypoints) {
      cmd->add_option("--method", method,
                      "random, mesh-saliency, salient-points, harris-adaptive or harris-rings");
    }
    stage_of[cmd] = c.stage;
  }

  auto* run = app.add_subcommand("run", "run every stage, reusing cached artifacts");
  add_common(run, common, true);

  auto* eval = app.add_subcommand("evaluate", "retrieval statistics for a distance matrix");
  add_common(eval, common, false);
  std::string matrix_path, labels_path, label = "matrix";
  eval->add_option("--matrix", matrix_path, "distance matrix CSV or binary (skips the pipeline)");
  eval->add_option("--labels", labels_path, ".cla or id,class labels");
  eval->add_option("--label", label, "method column for --matrix mode");

  auto* bench = app.add_subcommand("bench", "time every stage on a fresh cache");
  add_common(bench, common, true);

  auto* plot = app.add_subcommand("plot", "render PR curves and parameter sweeps to SVG");
  std::vector<std::string> plot_inputs;
  std::string plot_out = ".", sweep_key = "D";
  plot->add_option("inputs", plot_inputs, "stats or PR CSV files")->required();
  plot->add_option("--out", plot_out, "output directory");
  plot->add_option("--sweep", sweep_key, "parameter on the x axis of sweep charts");

  auto* toy = app.add_subcommand("toy", "write the bundled toy dataset");
  std::string toy_out = "toy";
  std::uint64_t toy_seed = 7;
  toy->add_option("--out", toy_out, "directory");
  toy->add_option("--seed", toy_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [cmd, stage] : stage_of) {
      if (!cmd->parsed()) continue;
      auto cfg = load(common);
      if (!method.empty()) apply_setting(cfg, "sampler", method);
      report(run_pipeline(cfg, stage, false));
      return 0;
    }
    if (run->parsed()) {
      report(run_pipeline(load(common), Stage::Evaluate, true));
      return 0;
    }
    if (eval->parsed()) {
      if (!matrix_path.empty()) {
        if (labels_path.empty()) throw std::invalid_argument("--matrix needs --labels");
        const auto dm = read_distance_matrix(matrix_path);
        const auto stats = evaluate(dm, read_labels(labels_path));
        const fs::path out = common.out.empty() ? fs::path(".") : fs::path(common.out);
        fs::create_directories(out);
        write_stats_csv(out / "stats.csv", label, "", stats);
        write_pr_csv(out / "pr.csv", stats.pr_curve);
        report({std::nullopt, stats, {}});
        return 0;
      }
      auto cfg = load(common);
      if (!labels_path.empty()) cfg.labels = labels_path;
      report(run_pipeline(cfg, Stage::Evaluate, false));
      return 0;
    }
    if (bench->parsed()) {
      auto cfg = load(common);
      cfg.cache = cfg.out / "bench-cache";
      fs::remove_all(cfg.cache);
      const auto r = run_pipeline(cfg, Stage::Evaluate, true);
      fs::remove_all(cfg.cache);
      std::ofstream csv(cfg.out / "bench.csv");
      csv << "stage,seconds\n";
      for (const auto& [s, t] : r.manifest.timings) {
        csv << to_string(s) << ',' << t << '\n';
        std::printf("%-11s %9.3f s\n", std::string(to_string(s)).c_str(), t);
      }
      return 0;
    }
    if (plot->parsed()) {
      fs::create_directories(plot_out);
      std::vector<fs::path> pr;
      std::vector<StatsRow> rows;
      for (const auto& in : plot_inputs) {
        std::ifstream f(in);
        std::string header;
        std::getline(f, header);
        if (header.rfind("recall", 0) == 0) {
          pr.emplace_back(in);
        } else {
          auto r = read_stats_csv(in);
          rows.insert(rows.end(), r.begin(), r.end());
        }
      }
      if (!pr.empty()) {
        std::ofstream(fs::path(plot_out) / "pr.svg") << render_pr_svg(pr);
        std::printf("%s\n", (fs::path(plot_out) / "pr.svg").string().c_str());
      }
      for (const auto& [m, svg] : render_sweeps(rows, sweep_key)) {
        std::string name = m;
        for (auto& ch : name) {
          if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
        }
        const auto path = fs::path(plot_out) / ("sweep_" + sweep_key + "_" + name + ".svg");
        std::ofstream(path) << svg;
        std::printf("%s\n", path.string().c_str());
      }
      return 0;
    }
    if (toy->parsed()) {
      std::printf("%s\n", write_toy_dataset(toy_out, toy_seed).string().c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "shaperet: %s\n", e.what());
    return 1;
  }
  return 0;
}
