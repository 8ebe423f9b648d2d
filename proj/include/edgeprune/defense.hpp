#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "edgeprune/attack.hpp"
#include "edgeprune/graph.hpp"
#include "edgeprune/numerics.hpp"
#include "edgeprune/train.hpp"

namespace edgeprune {

struct PrunerConfig {
  /// Fraction of the input graph's undirected edges that may be modified.
  double max_prune_fraction = 0.10;
  /// Augmentation draws summed into each gradient.
  std::size_t augmentation_draws = 10;
  bool use_feature_similarity = true;
  /// Cosine threshold: deletions need similarity < T, additions > T.
  double similarity_threshold = 0.5;
  std::size_t retrain_epochs_per_iteration = 1;
  /// Re-initialize the encoder every iteration (otherwise keep training one encoder).
  bool fresh_init = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Candidate {
  std::size_t i = 0;
  std::size_t j = 0;
  double gradient = 0.0;
  double similarity = 0.0;
};

/// Existing edges (i < j) with positive accumulated gradient and, when the
/// filter is on, feature cosine below the threshold. Sorted by gradient
/// descending, ties by (i, j).
std::vector<Candidate> candidate_set(const Adjacency& adjacency, const Matrix& gradient, const Matrix& features,
                                     double threshold, bool use_similarity);

/// Non-edges (i < j) with negative gradient and, when the filter is on,
/// cosine above the threshold. Sorted by |gradient| descending, ties by (i, j).
std::vector<Candidate> addition_candidate_set(const Adjacency& adjacency, const Matrix& gradient,
                                              const Matrix& features, double threshold, bool use_similarity);

enum class StopReason { budget_exhausted, empty_candidate_set };

const char* to_string(StopReason reason);

struct Modification {
  std::size_t iteration = 0;  // 1-based
  std::size_t i = 0;
  std::size_t j = 0;
  EdgeAction action = EdgeAction::deleted;
  double gradient = 0.0;
  double similarity = 0.0;
};

struct SanitizeReport {
  std::string engine;
  std::size_t input_edges = 0;
  std::size_t budget = 0;
  std::vector<Modification> modifications;
  /// Deterministic loss after each iteration's modification (iterative engines only).
  std::vector<double> losses;
  /// Running minimum after each iteration.
  std::vector<double> min_losses;
  std::optional<double> min_loss;
  /// 1-based iteration at which the returned graph was recorded.
  std::optional<std::size_t> opt_iteration;
  /// Encoder that produced min_loss; re-evaluating the returned graph with it
  /// reproduces min_loss exactly.
  std::optional<EncoderParams> opt_params;
  StopReason stop_reason = StopReason::budget_exhausted;
  /// One-shot pruning: requested deletions that had no candidate.
  std::size_t shortfall = 0;
  /// Modifications contained in the returned graph.
  std::size_t returned_modifications = 0;

  double realized_rate() const;
};

/// Iterative gradient-guided edge pruning with minimum-loss graph selection.
std::pair<Graph, SanitizeReport> edgepruner_sanitize(const Graph& graph, const PrunerConfig& cfg,
                                                     const TrainConfig& train, const AugmentationConfig& aug);

/// One-shot pruner: trains once, accumulates once, removes the top
/// floor(rate * |E|) candidates together.
std::pair<Graph, SanitizeReport> baseline_prune(const Graph& graph, const PrunerConfig& cfg, const TrainConfig& train,
                                                const AugmentationConfig& aug);

/// EdgePruner with Bernoulli(add_probability)-gated additions. With
/// add_probability == 0 the output equals edgepruner_sanitize bit for bit.
std::pair<Graph, SanitizeReport> edgemodifier_sanitize(const Graph& graph, const PrunerConfig& cfg,
                                                       double add_probability, const TrainConfig& train,
                                                       const AugmentationConfig& aug);

nlohmann::json sanitize_report_to_json(const SanitizeReport& report);
/// `iteration,loss,l_min,pruned_i,pruned_j`
void write_sanitize_trace_csv(const SanitizeReport& report, const std::filesystem::path& path);

}  // namespace edgeprune
