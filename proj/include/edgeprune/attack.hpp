#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <json.hpp>

#include "edgeprune/graph.hpp"
#include "edgeprune/train.hpp"

namespace edgeprune {

struct AttackConfig {
  /// Fraction of the clean graph's undirected edges to flip.
  double budget_fraction = 0.10;
  /// Epochs of continued training on the current poisoned graph before each flip.
  std::size_t retrain_epochs_per_flip = 1;
  /// Augmentation draws summed into each gradient.
  std::size_t views_per_gradient = 10;
  /// Epochs of training on the clean graph before the first flip.
  std::size_t pretrain_epochs = 100;
  /// Re-initialize and retrain for pretrain_epochs before every flip instead of warm-starting.
  bool fresh_retrain = false;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class EdgeAction { added, deleted };

const char* to_string(EdgeAction action);

struct Flip {
  std::size_t i = 0;
  std::size_t j = 0;
  EdgeAction action = EdgeAction::added;
  double gradient = 0.0;
  /// Deterministic loss of the current encoder before and after the flip.
  double loss_before = 0.0;
  double loss_after = 0.0;
};

struct AttackReport {
  std::size_t clean_edges = 0;
  std::size_t budget = 0;
  std::vector<Flip> flips;
  /// Set when no sign-consistent flip remained before the budget was spent.
  bool stopped_early = false;

  std::size_t additions() const;
  std::size_t deletions() const;
};

/// CLGA poisoning: repeatedly retrain, accumulate the adjacency gradient of
/// the contrastive loss and flip the entry whose first-order effect raises
/// the loss the most (add where gradient > 0, delete where gradient < 0).
/// Features are never modified.
std::pair<Graph, AttackReport> clga_poison(const Graph& graph, const AttackConfig& cfg, const TrainConfig& train,
                                           const AugmentationConfig& aug);

nlohmann::json attack_report_to_json(const AttackReport& report);
/// `flip,i,j,action,gradient,loss_before,loss_after`
void write_attack_trace_csv(const AttackReport& report, const std::filesystem::path& path);

}  // namespace edgeprune
