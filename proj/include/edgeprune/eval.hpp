#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgeprune/defense.hpp"
#include "edgeprune/graph.hpp"
#include "edgeprune/numerics.hpp"
#include "edgeprune/train.hpp"

namespace edgeprune {

struct SplitSpec {
  double train_frac = 0.10;
  double val_frac = 0.10;
  double test_frac = 0.80;
  std::size_t n_repeats = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Random permutation cut into train/val/test by the split fractions
/// (train and val sizes rounded, test takes the remainder).
Split random_split(std::size_t n, const SplitSpec& spec, Rng& rng);

struct ProbeHyper {
  double l2 = 1e-3;
  std::size_t max_iter = 2000;
  double tol = 1e-5;
};

/// Multinomial logistic regression on standardized embeddings.
struct LogisticProbe {
  Vector mean;
  Vector scale;
  Matrix weights;  // e x C
  Vector bias;     // C
  std::size_t iterations = 0;
  bool converged = false;

  std::vector<int> predict(const Matrix& embeddings) const;
};

/// Full-batch gradient descent on the L2-regularized softmax cross-entropy
/// of the training rows only. Standardization statistics come from the
/// training rows; the bias is not regularized. Stops when the gradient norm
/// drops below `tol` or after `max_iter` steps.
LogisticProbe train_probe(const Matrix& embeddings, const std::vector<int>& labels,
                          std::span<const std::size_t> train_idx, std::size_t num_classes, const ProbeHyper& hyper);

struct EvalResult {
  std::vector<double> accuracies;
  double mean = 0.0;
  double std = 0.0;
  /// Splits redrawn because a class was missing from the training part.
  std::size_t resampled_splits = 0;
};

EvalResult evaluate_embeddings(const Matrix& embeddings, const std::vector<int>& labels, const SplitSpec& split,
                               const ProbeHyper& probe);

/// Embeds the graph once with the encoder and probes n_repeats random splits.
EvalResult node_classification_accuracy(const Graph& graph, const EncoderParams& params, const SplitSpec& split,
                                        const ProbeHyper& probe = {});

/// Trains a fresh encoder on `graph` and evaluates its embeddings.
EvalResult train_and_evaluate(const Graph& graph, const TrainConfig& train, const AugmentationConfig& aug,
                              const SplitSpec& split, const ProbeHyper& probe = {});

/// Added / deleted undirected edges of `modified` relative to `clean`.
EdgeDelta modification_stats(const Graph& clean, const Graph& modified);

struct SimilarityClassStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  std::vector<std::size_t> histogram;
};

struct SimilarityStats {
  SimilarityClassStats clean;
  /// Empty (count 0) when the poisoned graph has no edges outside the clean graph.
  SimilarityClassStats adversarial;
  double bin_min = 0.0;
  double bin_max = 0.0;
  std::size_t bins = 50;
};

/// Feature cosine of edges kept from `clean` versus edges only in `poisoned`,
/// histogrammed over shared uniform bins spanning the observed range.
SimilarityStats similarity_stats(const Graph& clean, const Graph& poisoned, std::size_t bins = 50);

/// Fraction of sanitizer deletions that removed adversarial edges; nullopt
/// when nothing was deleted.
std::optional<double> pruned_edge_precision(const SanitizeReport& report, const Graph& clean, const Graph& poisoned);

enum class SanitizerEngine { edgepruner, edgepruner_nf, baseline, baseline_nf, edgemodifier };

std::optional<SanitizerEngine> parse_engine(const std::string& name);
std::string to_string(SanitizerEngine engine);
std::vector<std::string> engine_names();

/// Dispatches to the selected sanitizer; "-nf" engines force the similarity filter off.
std::pair<Graph, SanitizeReport> run_sanitizer(SanitizerEngine engine, const Graph& graph, PrunerConfig cfg,
                                               double add_probability, const TrainConfig& train,
                                               const AugmentationConfig& aug);

struct SweepRow {
  double rate = 0.0;
  EvalResult eval;
  std::optional<double> min_loss;
  double realized_rate = 0.0;
};

/// One sanitize + evaluate run per pruning rate with shared seeds.
std::vector<SweepRow> pruning_sweep(const Graph& graph, const std::vector<double>& rates, SanitizerEngine engine,
                                    const PrunerConfig& cfg, double add_probability, const TrainConfig& train,
                                    const AugmentationConfig& aug, const SplitSpec& split, const ProbeHyper& probe = {});

/// `split_index,accuracy` rows followed by `mean,<m>` and `std,<s>`.
void write_eval_csv(const EvalResult& result, const std::filesystem::path& path);
/// `rate,mean_acc,std_acc,l_min,realized_prune_rate`
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

nlohmann::json similarity_stats_to_json(const SimilarityStats& stats);

}  // namespace edgeprune
