#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shaperet/bow.hpp"
#include "shaperet/config.hpp"
#include "shaperet/retrieval_eval.hpp"

namespace shaperet {

enum class Stage { Ingest, Describe, Reduce, Keypoints, Dictionary, Signatures, Distmat, Evaluate };

std::string_view to_string(Stage s);

/// Failure tagged with the stage and, when known, the mesh being processed.
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& mesh_id, const std::string& what);
  Stage stage() const noexcept { return stage_; }
  const std::string& mesh_id() const noexcept { return mesh_id_; }

 private:
  Stage stage_;
  std::string mesh_id_;
};

struct ArtifactRecord {
  Stage stage;
  std::string key;  // 16 hex digits
  std::string file;
  bool hit;
};

struct RunManifest {
  RunConfig config;
  std::vector<ArtifactRecord> artifacts;
  std::vector<std::pair<Stage, double>> timings;  // seconds, in stage order
  std::vector<std::string> warnings;
  std::string version = SHAPERET_VERSION;

  bool all_hits() const;
  std::size_t misses(Stage s) const;
  std::string to_json() const;
};

struct PipelineResult {
  std::optional<DistanceMatrix> matrix;
  std::optional<RetrievalStats> stats;
  RunManifest manifest;
};

/// Runs stages up to `target`. With `compute_upstream` false, stages before
/// the target must already be in the cache. Outputs of the target stage are
/// written to the configured output directory together with manifest.json.
PipelineResult run_pipeline(const RunConfig& config, Stage target = Stage::Evaluate,
                            bool compute_upstream = true);

/// Writes the bundled toy dataset: 3 classes x 6 jittered instances of
/// icospheres, ellipsoids and tori, a .cla label file and a config file.
/// Returns the config path.
std::filesystem::path write_toy_dataset(const std::filesystem::path& dir, std::uint64_t seed = 7);

}  // namespace shaperet
