#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "shaperet/descriptors.hpp"

namespace shaperet {

enum class Combination { None, VS, VD, HistS, HistD };

std::string_view to_string(Combination c);
Combination parse_combination(std::string_view name);

/// Vertex sampler names: random, mesh-saliency, salient-points,
/// harris-adaptive, harris-rings.
bool is_known_sampler(std::string_view name);

struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path labels;
  std::vector<DescriptorKind> kinds{DescriptorKind::Mean};
  Combination combination = Combination::None;
  std::string sampler = "random";
  std::size_t samples = 500;       // n, for the random sampler
  std::size_t dictionary_size = 500;  // D
  std::uint64_t seed = 1;
  int rings = 5;
  int max_iter = 100;
  double eigen_ratio = 0.10;
  std::filesystem::path out = "out";
  std::filesystem::path cache;     // empty: SHAPERET_CACHE or <out>/cache
  int threads = 0;                 // 0: OpenMP default

  /// Combination modes that pair different point sets per kind.
  bool different_points() const {
    return combination == Combination::VD || combination == Combination::HistD;
  }
  /// Label for stats rows, e.g. "Mean+SI/HistS".
  std::string method_label() const;
  /// Compact "key=value;..." summary of the retrieval-relevant knobs.
  std::string parameter_label() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig read_config(const std::filesystem::path& path, RunConfig base = {});
/// Applies one key=value assignment (used for both files and CLI overrides).
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
std::string serialize_config(const RunConfig& cfg);

/// Checks value constraints; with `check_paths`, also that inputs exist.
void validate(const RunConfig& cfg, bool check_paths = true);

inline constexpr const char* kCacheEnv = "SHAPERET_CACHE";

/// Resolved cache directory: explicit setting, else $SHAPERET_CACHE, else <out>/cache.
std::filesystem::path cache_dir(const RunConfig& cfg);

}  // namespace shaperet
