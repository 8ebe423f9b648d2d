#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "edgeprune/graph.hpp"
#include "edgeprune/numerics.hpp"
#include "edgeprune/rng.hpp"

namespace edgeprune {

struct ViewRates {
  double edge_drop_rate = 0.2;
  double feature_mask_rate = 0.1;
};

/// Stochastic augmentation applied independently to each of the two views.
struct AugmentationConfig {
  ViewRates view1{0.2, 0.1};
  ViewRates view2{0.4, 0.1};
  /// Mask individual entries instead of whole feature columns.
  bool per_entry_feature_mask = false;

  void validate() const;
  static AugmentationConfig none() { return {{0.0, 0.0}, {0.0, 0.0}, false}; }
};

struct TrainConfig {
  std::size_t epochs = 200;
  double tau = 0.5;
  std::size_t hidden_dim = 128;
  std::size_t embed_dim = 64;
  AdamHyper adam{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Drops each undirected edge (both entries together) with the view's edge
/// rate, then zeroes feature columns (or entries) with the mask rate.
/// Edges are visited in lexicographic order so the draw sequence is fixed.
GraphView augment(const Graph& graph, const ViewRates& rates, bool per_entry_mask, Rng& rng);

/// Full-batch contrastive trainer. Holds weights, Adam moments and the
/// augmentation stream so training can be continued (warm start).
class ContrastiveTrainer {
 public:
  ContrastiveTrainer(const TrainConfig& train, const AugmentationConfig& aug, std::size_t input_dim,
                     std::uint64_t seed);

  /// One epoch: draw two views, evaluate the loss, take one Adam step.
  /// Returns the pre-step loss. Throws NumericalError with the epoch index.
  double run_epoch(const Graph& graph);
  std::vector<double> run_epochs(const Graph& graph, std::size_t epochs);

  const EncoderParams& params() const { return params_; }
  std::size_t epochs_done() const { return epochs_done_; }

 private:
  TrainConfig train_;
  AugmentationConfig aug_;
  EncoderParams params_;
  AdamState adam_;
  Rng rng_;
  std::size_t epochs_done_ = 0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<double> losses;
};

/// Trains a fresh encoder for cfg.epochs epochs seeded from cfg.seed.
TrainResult train_encoder(const Graph& graph, const TrainConfig& cfg, const AugmentationConfig& aug);

/// Writes `epoch,loss` rows (1-based epochs).
void write_loss_csv(const std::vector<double>& losses, const std::filesystem::path& path);

/// Contrastive loss with both views equal to the unaugmented graph. This is
/// the deterministic loss used for minimum-loss graph selection.
double deterministic_loss(const EncoderParams& params, const Adjacency& adjacency, const Matrix& features, double tau);

}  // namespace edgeprune
