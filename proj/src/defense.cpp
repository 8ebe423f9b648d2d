#include "edgeprune/defense.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <tuple>

#include "edgeprune/errors.hpp"
#include "edgeprune/gradient.hpp"

namespace edgeprune {

void PrunerConfig::validate() const {
  if (!(max_prune_fraction >= 0.0 && max_prune_fraction <= 1.0)) {
    throw ContractError("max_prune_fraction must lie in [0,1]");
  }
  if (augmentation_draws == 0) throw ContractError("augmentation_draws must be at least 1");
  if (!(similarity_threshold >= -1.0 && similarity_threshold <= 1.0)) {
    throw ContractError("similarity_threshold must lie in [-1,1]");
  }
}

const char* to_string(StopReason reason) {
  return reason == StopReason::budget_exhausted ? "budget exhausted" : "empty candidate set";
}

double SanitizeReport::realized_rate() const {
  return input_edges == 0 ? 0.0 : static_cast<double>(returned_modifications) / static_cast<double>(input_edges);
}

namespace {

bool by_magnitude(const Candidate& a, const Candidate& b) {
  const double ma = std::abs(a.gradient);
  const double mb = std::abs(b.gradient);
  if (ma != mb) return ma > mb;
  return std::tie(a.i, a.j) < std::tie(b.i, b.j);
}

}  // namespace

std::vector<Candidate> candidate_set(const Adjacency& adjacency, const Matrix& gradient, const Matrix& features,
                                     double threshold, bool use_similarity) {
  std::vector<Candidate> out;
  for (const auto& [i, j] : adjacency.edges()) {
    const double g = gradient(i, j);
    if (!(g > 0.0)) continue;
    const double sim = cosine_similarity(features, i, j);
    if (use_similarity && !(sim < threshold)) continue;
    out.push_back({i, j, g, sim});
  }
  std::sort(out.begin(), out.end(), by_magnitude);
  return out;
}

std::vector<Candidate> addition_candidate_set(const Adjacency& adjacency, const Matrix& gradient,
                                              const Matrix& features, double threshold, bool use_similarity) {
  std::vector<Candidate> out;
  const std::size_t n = adjacency.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacency.has_edge(i, j)) continue;
      const double g = gradient(i, j);
      if (!(g < 0.0)) continue;
      const double sim = cosine_similarity(features, i, j);
      if (use_similarity && !(sim > threshold)) continue;
      out.push_back({i, j, g, sim});
    }
  }
  std::sort(out.begin(), out.end(), by_magnitude);
  return out;
}

namespace {

std::pair<Graph, SanitizeReport> iterative_sanitize(const Graph& graph, const PrunerConfig& cfg, double add_probability,
                                                    const TrainConfig& train, const AugmentationConfig& aug,
                                                    const char* engine) {
  graph.validate();
  cfg.validate();
  train.validate();
  aug.validate();
  if (!(add_probability >= 0.0 && add_probability <= 1.0)) throw ContractError("add_probability must lie in [0,1]");

  SanitizeReport report;
  report.engine = engine;
  report.input_edges = graph.adjacency.edge_count();
  report.budget = edge_budget(cfg.max_prune_fraction, report.input_edges);

  Graph current = graph;
  Adjacency best = graph.adjacency;
  double min_loss = std::numeric_limits<double>::infinity();

  const std::size_t d = graph.feature_dim();
  Rng grad_rng(derive_seed(cfg.seed, "sanitize-gradient"));
  // Separate stream so the add/delete coin never shifts the augmentation draws.
  Rng coin_rng(derive_seed(cfg.seed, "sanitize-coin"));
  std::unique_ptr<ContrastiveTrainer> trainer;
  if (!cfg.fresh_init) trainer = std::make_unique<ContrastiveTrainer>(train, aug, d, derive_seed(cfg.seed, "sanitize-train"));

  for (std::size_t it = 0; it < report.budget; ++it) {
    if (cfg.fresh_init) {
      trainer = std::make_unique<ContrastiveTrainer>(train, aug, d, derive_seed(cfg.seed, "sanitize-train", it));
    }
    trainer->run_epochs(current, cfg.retrain_epochs_per_iteration);
    const EncoderParams& params = trainer->params();
    const Matrix grad = accumulate_adjacency_gradient(current.adjacency, current.features, params,
                                                      cfg.augmentation_draws, aug, train.tau, grad_rng);

    const double T = cfg.similarity_threshold;
    const bool sim = cfg.use_feature_similarity;
    const bool can_add = add_probability > 0.0;
    const bool want_add = can_add && coin_rng.bernoulli(add_probability);

    std::vector<Candidate> deletions = candidate_set(current.adjacency, grad, current.features, T, sim);
    std::vector<Candidate> additions;
    if (can_add) additions = addition_candidate_set(current.adjacency, grad, current.features, T, sim);

    const Candidate* pick = nullptr;
    EdgeAction action = EdgeAction::deleted;
    if (want_add && !additions.empty()) {
      pick = &additions.front();
      action = EdgeAction::added;
    } else if (!deletions.empty()) {
      pick = &deletions.front();
    } else if (can_add && !additions.empty()) {
      pick = &additions.front();
      action = EdgeAction::added;
    }
    if (pick == nullptr) {
      report.stop_reason = StopReason::empty_candidate_set;
      break;
    }

    current.adjacency.set_edge(pick->i, pick->j, action == EdgeAction::added);
    report.modifications.push_back({it + 1, pick->i, pick->j, action, pick->gradient, pick->similarity});

    const double loss = deterministic_loss(params, current.adjacency, current.features, train.tau);
    report.losses.push_back(loss);
    if (loss < min_loss) {
      min_loss = loss;
      best = current.adjacency;
      report.min_loss = loss;
      report.opt_iteration = it + 1;
      report.opt_params = params;
      report.returned_modifications = report.modifications.size();
    }
    report.min_losses.push_back(min_loss);
  }

  Graph out = graph;
  out.adjacency = std::move(best);
  return {std::move(out), std::move(report)};
}

}  // namespace

std::pair<Graph, SanitizeReport> edgepruner_sanitize(const Graph& graph, const PrunerConfig& cfg,
                                                     const TrainConfig& train, const AugmentationConfig& aug) {
  return iterative_sanitize(graph, cfg, 0.0, train, aug, cfg.use_feature_similarity ? "edgepruner" : "edgepruner-nf");
}

std::pair<Graph, SanitizeReport> edgemodifier_sanitize(const Graph& graph, const PrunerConfig& cfg,
                                                       double add_probability, const TrainConfig& train,
                                                       const AugmentationConfig& aug) {
  return iterative_sanitize(graph, cfg, add_probability, train, aug, "edgemodifier");
}

std::pair<Graph, SanitizeReport> baseline_prune(const Graph& graph, const PrunerConfig& cfg, const TrainConfig& train,
                                                const AugmentationConfig& aug) {
  graph.validate();
  cfg.validate();
  train.validate();
  aug.validate();

  SanitizeReport report;
  report.engine = cfg.use_feature_similarity ? "baseline" : "baseline-nf";
  report.input_edges = graph.adjacency.edge_count();
  report.budget = edge_budget(cfg.max_prune_fraction, report.input_edges);
  Graph out = graph;
  if (report.budget == 0) return {std::move(out), std::move(report)};

  // Same encoder and gradient stream as the first iterative step.
  ContrastiveTrainer trainer(train, aug, graph.feature_dim(), derive_seed(cfg.seed, "sanitize-train", 0));
  trainer.run_epochs(graph, cfg.retrain_epochs_per_iteration);
  Rng grad_rng(derive_seed(cfg.seed, "sanitize-gradient"));
  const Matrix grad = accumulate_adjacency_gradient(graph.adjacency, graph.features, trainer.params(),
                                                    cfg.augmentation_draws, aug, train.tau, grad_rng);
  const std::vector<Candidate> candidates =
      candidate_set(graph.adjacency, grad, graph.features, cfg.similarity_threshold, cfg.use_feature_similarity);

  const std::size_t take = std::min(report.budget, candidates.size());
  for (std::size_t k = 0; k < take; ++k) {
    const Candidate& c = candidates[k];
    out.adjacency.set_edge(c.i, c.j, false);
    report.modifications.push_back({1, c.i, c.j, EdgeAction::deleted, c.gradient, c.similarity});
  }
  report.shortfall = report.budget - take;
  report.returned_modifications = take;
  report.stop_reason = report.shortfall > 0 ? StopReason::empty_candidate_set : StopReason::budget_exhausted;
  return {std::move(out), std::move(report)};
}

nlohmann::json sanitize_report_to_json(const SanitizeReport& report) {
  using nlohmann::json;
  json mods = json::array();
  for (const auto& m : report.modifications) {
    mods.push_back({{"iteration", m.iteration},
                    {"i", m.i},
                    {"j", m.j},
                    {"action", to_string(m.action)},
                    {"gradient", m.gradient},
                    {"feature_similarity", m.similarity}});
  }
  return {{"engine", report.engine},
          {"input_edges", report.input_edges},
          {"budget", report.budget},
          {"modifications", std::move(mods)},
          {"losses", report.losses},
          {"min_loss", report.min_loss ? json(*report.min_loss) : json(nullptr)},
          {"opt_iteration", report.opt_iteration ? json(*report.opt_iteration) : json(nullptr)},
          {"stop_reason", to_string(report.stop_reason)},
          {"shortfall", report.shortfall},
          {"returned_modifications", report.returned_modifications},
          {"realized_rate", report.realized_rate()}};
}

void write_sanitize_trace_csv(const SanitizeReport& report, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "iteration,loss,l_min,pruned_i,pruned_j\n";
  for (std::size_t k = 0; k < report.modifications.size(); ++k) {
    const Modification& m = report.modifications[k];
    out << m.iteration << ',';
    if (k < report.losses.size()) out << report.losses[k] << ',' << report.min_losses[k];
    else out << ',';
    out << ',' << m.i << ',' << m.j << '\n';
  }
}

}  // namespace edgeprune
