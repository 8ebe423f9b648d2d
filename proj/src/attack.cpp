#include "edgeprune/attack.hpp"

#include <fstream>
#include <memory>
#include <vector>

#include "edgeprune/errors.hpp"
#include "edgeprune/gradient.hpp"

namespace edgeprune {

void AttackConfig::validate() const {
  if (!(budget_fraction >= 0.0 && budget_fraction <= 1.0)) throw ContractError("attack budget_fraction must lie in [0,1]");
  if (views_per_gradient == 0) throw ContractError("views_per_gradient must be at least 1");
}

const char* to_string(EdgeAction action) { return action == EdgeAction::added ? "added" : "deleted"; }

std::size_t AttackReport::additions() const {
  std::size_t count = 0;
  for (const auto& f : flips) count += f.action == EdgeAction::added ? 1 : 0;
  return count;
}

std::size_t AttackReport::deletions() const { return flips.size() - additions(); }

namespace {

struct BestFlip {
  std::size_t i = 0;
  std::size_t j = 0;
  double score = 0.0;
  bool found = false;
};

// Largest loss-increasing score over the upper triangle, skipping pairs that
// were already flipped. Strict comparison in row-major order breaks ties
// toward the lexicographically smallest pair.
BestFlip best_flip(const Adjacency& adj, const Matrix& grad, const std::vector<bool>& flipped) {
  BestFlip best;
  const std::size_t n = adj.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (flipped[i * n + j]) continue;
      const double g = grad(i, j);
      const double score = adj.has_edge(i, j) ? -g : g;
      if (score > 0.0 && (!best.found || score > best.score)) best = {i, j, score, true};
    }
  }
  return best;
}

}  // namespace

std::pair<Graph, AttackReport> clga_poison(const Graph& graph, const AttackConfig& cfg, const TrainConfig& train,
                                           const AugmentationConfig& aug) {
  graph.validate();
  cfg.validate();
  train.validate();
  aug.validate();

  AttackReport report;
  report.clean_edges = graph.adjacency.edge_count();
  report.budget = edge_budget(cfg.budget_fraction, report.clean_edges);
  Graph poisoned = graph;
  if (report.budget == 0) return {std::move(poisoned), std::move(report)};

  const std::size_t d = graph.feature_dim();
  auto trainer = std::make_unique<ContrastiveTrainer>(train, aug, d, derive_seed(cfg.seed, "attack-train"));
  if (!cfg.fresh_retrain) trainer->run_epochs(poisoned, cfg.pretrain_epochs);
  Rng grad_rng(derive_seed(cfg.seed, "attack-gradient"));
  std::vector<bool> flipped(graph.num_nodes() * graph.num_nodes(), false);

  for (std::size_t t = 0; t < report.budget; ++t) {
    if (cfg.fresh_retrain) {
      trainer = std::make_unique<ContrastiveTrainer>(train, aug, d, derive_seed(cfg.seed, "attack-fresh", t));
      trainer->run_epochs(poisoned, cfg.pretrain_epochs);
    } else {
      trainer->run_epochs(poisoned, cfg.retrain_epochs_per_flip);
    }
    const EncoderParams& params = trainer->params();
    const Matrix grad = accumulate_adjacency_gradient(poisoned.adjacency, poisoned.features, params,
                                                      cfg.views_per_gradient, aug, train.tau, grad_rng);
    const BestFlip best = best_flip(poisoned.adjacency, grad, flipped);
    if (!best.found) {
      report.stopped_early = true;
      break;
    }
    Flip flip;
    flip.i = best.i;
    flip.j = best.j;
    flip.gradient = grad(best.i, best.j);
    flip.action = poisoned.adjacency.has_edge(best.i, best.j) ? EdgeAction::deleted : EdgeAction::added;
    flip.loss_before = deterministic_loss(params, poisoned.adjacency, poisoned.features, train.tau);
    poisoned.adjacency.set_edge(best.i, best.j, flip.action == EdgeAction::added);
    flip.loss_after = deterministic_loss(params, poisoned.adjacency, poisoned.features, train.tau);
    flipped[best.i * graph.num_nodes() + best.j] = true;
    report.flips.push_back(flip);
  }
  return {std::move(poisoned), std::move(report)};
}

nlohmann::json attack_report_to_json(const AttackReport& report) {
  nlohmann::json flips = nlohmann::json::array();
  for (const auto& f : report.flips) {
    flips.push_back({{"i", f.i},
                     {"j", f.j},
                     {"action", to_string(f.action)},
                     {"gradient", f.gradient},
                     {"loss_before", f.loss_before},
                     {"loss_after", f.loss_after}});
  }
  return {{"clean_edges", report.clean_edges},
          {"budget", report.budget},
          {"added", report.additions()},
          {"deleted", report.deletions()},
          {"stopped_early", report.stopped_early},
          {"flips", std::move(flips)}};
}

void write_attack_trace_csv(const AttackReport& report, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "flip,i,j,action,gradient,loss_before,loss_after\n";
  for (std::size_t t = 0; t < report.flips.size(); ++t) {
    const Flip& f = report.flips[t];
    out << t + 1 << ',' << f.i << ',' << f.j << ',' << to_string(f.action) << ',' << f.gradient << ','
        << f.loss_before << ',' << f.loss_after << '\n';
  }
}

}  // namespace edgeprune
