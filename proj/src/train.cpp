#include "edgeprune/train.hpp"

#include <fstream>
#include <string>

#include "edgeprune/errors.hpp"

namespace edgeprune {

namespace {

void check_rates(const ViewRates& r, const char* which) {
  auto ok = [](double p) { return p >= 0.0 && p < 1.0; };
  if (!ok(r.edge_drop_rate) || !ok(r.feature_mask_rate)) {
    throw ContractError(std::string(which) + ": augmentation rates must lie in [0,1)");
  }
}

}  // namespace

void AugmentationConfig::validate() const {
  check_rates(view1, "view1");
  check_rates(view2, "view2");
}

void TrainConfig::validate() const {
  if (epochs == 0) throw ContractError("epochs must be at least 1");
  if (!(tau > 0.0)) throw ContractError("tau must be positive");
  if (hidden_dim == 0 || embed_dim == 0) throw ContractError("encoder dimensions must be positive");
  adam.validate();
}

GraphView augment(const Graph& graph, const ViewRates& rates, bool per_entry_mask, Rng& rng) {
  GraphView view{graph.adjacency.dense(), graph.features};
  const std::size_t n = graph.num_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (view.adjacency(i, j) == 0.0) continue;
      if (rng.bernoulli(rates.edge_drop_rate)) {
        view.adjacency(i, j) = 0.0;
        view.adjacency(j, i) = 0.0;
      }
    }
  }
  if (per_entry_mask) {
    for (Eigen::Index k = 0; k < view.features.size(); ++k)
      if (rng.bernoulli(rates.feature_mask_rate)) view.features.data()[k] = 0.0;
  } else {
    for (Eigen::Index c = 0; c < view.features.cols(); ++c)
      if (rng.bernoulli(rates.feature_mask_rate)) view.features.col(c).setZero();
  }
  return view;
}

ContrastiveTrainer::ContrastiveTrainer(const TrainConfig& train, const AugmentationConfig& aug, std::size_t input_dim,
                                       std::uint64_t seed)
    : train_(train),
      aug_(aug),
      params_(init_encoder(input_dim, train.hidden_dim, train.embed_dim, derive_seed(seed, "init"))),
      adam_(AdamState::zeros_like(params_)),
      rng_(derive_seed(seed, "augment")) {
  train_.validate();
  aug_.validate();
}

double ContrastiveTrainer::run_epoch(const Graph& graph) {
  const GraphView v1 = augment(graph, aug_.view1, aug_.per_entry_feature_mask, rng_);
  const GraphView v2 = augment(graph, aug_.view2, aug_.per_entry_feature_mask, rng_);
  LossGrads g;
  try {
    g = loss_and_grads(params_, v1, v2, train_.tau, false);
  } catch (const NumericalError& e) {
    throw NumericalError("epoch " + std::to_string(epochs_done_ + 1) + ": " + e.what());
  }
  adam_step(params_, g.grad_w1, g.grad_w2, adam_, train_.adam);
  if (!params_.w1.allFinite() || !params_.w2.allFinite()) {
    throw NumericalError("epoch " + std::to_string(epochs_done_ + 1) + ": non-finite weights after update");
  }
  ++epochs_done_;
  return g.loss;
}

std::vector<double> ContrastiveTrainer::run_epochs(const Graph& graph, std::size_t epochs) {
  std::vector<double> losses;
  losses.reserve(epochs);
  for (std::size_t e = 0; e < epochs; ++e) losses.push_back(run_epoch(graph));
  return losses;
}

TrainResult train_encoder(const Graph& graph, const TrainConfig& cfg, const AugmentationConfig& aug) {
  cfg.validate();
  ContrastiveTrainer trainer(cfg, aug, graph.feature_dim(), cfg.seed);
  TrainResult result;
  result.losses = trainer.run_epochs(graph, cfg.epochs);
  result.params = trainer.params();
  return result;
}

void write_loss_csv(const std::vector<double>& losses, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) out << e + 1 << ',' << losses[e] << '\n';
}

double deterministic_loss(const EncoderParams& params, const Adjacency& adjacency, const Matrix& features, double tau) {
  const Matrix h = gcn_forward(params, adjacency.dense(), features);
  return contrastive_loss(h, h, tau);
}

}  // namespace edgeprune
