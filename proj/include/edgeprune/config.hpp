#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeprune/attack.hpp"
#include "edgeprune/defense.hpp"
#include "edgeprune/eval.hpp"
#include "edgeprune/graph.hpp"
#include "edgeprune/train.hpp"

namespace edgeprune {

struct DatasetConfig {
  /// Synthetic graph parameters, used when `path` is empty. The SBM seed is
  /// derived from the global seed.
  SBMParams sbm{};
  /// Graph JSON file to load instead of generating.
  std::string path;
  std::optional<std::size_t> subsample;
};

struct SanitizeConfig {
  std::string engine = "edgepruner";
  PrunerConfig pruner{};
  double add_probability = 0.0;
};

/// Every setting of a pipeline run. Stage seeds inside the nested configs
/// are not read from the file; they are derived from `seed` per stage.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  DatasetConfig dataset{};
  TrainConfig train{};
  AugmentationConfig augmentation{};
  AttackConfig attack{};
  SanitizeConfig sanitize{};
  SplitSpec split{};
  ProbeHyper probe{};
  std::vector<double> sweep_rates{0.01, 0.03, 0.05, 0.07, 0.10};
  /// Graph files consumed by `inspect`.
  std::string inspect_clean;
  std::string inspect_other;

  /// Fills the per-stage seeds from the global seed.
  void derive_stage_seeds();
  void validate() const;
};

/// Strict parse: unknown keys and wrong types throw ConfigError with the key path.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace edgeprune
