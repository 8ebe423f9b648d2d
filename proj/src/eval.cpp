#include "edgeprune/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "edgeprune/errors.hpp"
#include "edgeprune/rng.hpp"

namespace edgeprune {

void SplitSpec::validate() const {
  auto ok = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!ok(train_frac) || !ok(val_frac) || !ok(test_frac)) throw ContractError("split fractions must lie in [0,1]");
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) throw ContractError("split fractions must sum to 1");
  if (train_frac <= 0.0 || test_frac <= 0.0) throw ContractError("train and test fractions must be positive");
  if (n_repeats == 0) throw ContractError("n_repeats must be at least 1");
}

Split random_split(std::size_t n, const SplitSpec& spec, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  const auto n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(spec.train_frac * n)));
  const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::lround(spec.val_frac * n)));
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  return s;
}

std::vector<int> LogisticProbe::predict(const Matrix& embeddings) const {
  Matrix z = (embeddings.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  Matrix logits = z * weights;
  logits.rowwise() += bias.transpose();
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

namespace {

struct ProbeObjective {
  const Matrix& x;       // m x e, standardized
  const Matrix& onehot;  // m x C
  double l2;

  double value(const Matrix& w, const Vector& b, Matrix* gw, Vector* gb) const {
    Matrix logits = x * w;
    logits.rowwise() += b.transpose();
    const double m = static_cast<double>(x.rows());
    double loss = 0.0;
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      const double mx = logits.row(r).maxCoeff();
      const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
      p.row(r) = (logits.row(r).array() - lse).exp();
      loss -= (onehot.row(r).array() * (logits.row(r).array() - lse)).sum();
    }
    loss = loss / m + 0.5 * l2 * w.squaredNorm();
    if (gw != nullptr) {
      const Matrix diff = (p - onehot) / m;
      *gw = x.transpose() * diff + l2 * w;
      *gb = diff.colwise().sum().transpose();
    }
    return loss;
  }
};

}  // namespace

LogisticProbe train_probe(const Matrix& embeddings, const std::vector<int>& labels,
                          std::span<const std::size_t> train_idx, std::size_t num_classes, const ProbeHyper& hyper) {
  if (train_idx.empty()) throw ContractError("probe needs at least one training node");
  if (num_classes == 0) throw ContractError("probe needs at least one class");
  const auto m = static_cast<Eigen::Index>(train_idx.size());
  const auto e = embeddings.cols();
  const auto C = static_cast<Eigen::Index>(num_classes);

  Matrix raw(m, e);
  Matrix onehot = Matrix::Zero(m, C);
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t v = train_idx[static_cast<std::size_t>(r)];
    raw.row(r) = embeddings.row(static_cast<Eigen::Index>(v));
    onehot(r, labels[v]) = 1.0;
  }

  LogisticProbe probe;
  probe.mean = raw.colwise().mean().transpose();
  Matrix centered = raw.rowwise() - probe.mean.transpose();
  probe.scale = (centered.colwise().squaredNorm() / static_cast<double>(m)).cwiseSqrt().transpose();
  for (Eigen::Index k = 0; k < e; ++k)
    if (!(probe.scale(k) > 1e-12)) probe.scale(k) = 1.0;
  const Matrix x = centered.array().rowwise() / probe.scale.transpose().array();

  // Per-block step sizes from curvature bounds (softmax Hessian <= 1/2),
  // safeguarded by backtracking so each step decreases the objective.
  const double max_row = x.rowwise().squaredNorm().maxCoeff();
  const double step_w = 1.0 / (0.5 * max_row + hyper.l2);
  const double step_b = 2.0;

  ProbeObjective obj{x, onehot, hyper.l2};
  probe.weights = Matrix::Zero(e, C);
  probe.bias = Vector::Zero(C);
  Matrix gw;
  Vector gb;
  double f = obj.value(probe.weights, probe.bias, &gw, &gb);
  for (std::size_t it = 0; it < hyper.max_iter; ++it) {
    const double gnorm = std::sqrt(gw.squaredNorm() + gb.squaredNorm());
    if (gnorm < hyper.tol) {
      probe.converged = true;
      break;
    }
    const double decrease = step_w * gw.squaredNorm() + step_b * gb.squaredNorm();
    double t = 1.0;
    Matrix w_new;
    Vector b_new;
    double f_new = f;
    for (int bt = 0; bt < 60; ++bt) {
      w_new = probe.weights - t * step_w * gw;
      b_new = probe.bias - t * step_b * gb;
      f_new = obj.value(w_new, b_new, nullptr, nullptr);
      if (f_new <= f - 0.5 * t * decrease) break;
      t *= 0.5;
    }
    if (!(f_new < f)) {
      probe.converged = true;  // no further decrease representable
      break;
    }
    probe.weights = std::move(w_new);
    probe.bias = std::move(b_new);
    f = obj.value(probe.weights, probe.bias, &gw, &gb);
    probe.iterations = it + 1;
  }
  return probe;
}

namespace {

double population_std(const std::vector<double>& xs, double mean) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

}  // namespace

EvalResult evaluate_embeddings(const Matrix& embeddings, const std::vector<int>& labels, const SplitSpec& split,
                               const ProbeHyper& probe) {
  split.validate();
  const auto n = static_cast<std::size_t>(embeddings.rows());
  if (labels.size() != n) throw ContractError("label count does not match embedding rows");
  const std::size_t C = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  const std::set<int> present(labels.begin(), labels.end());

  EvalResult result;
  for (std::size_t rep = 0; rep < split.n_repeats; ++rep) {
    Split s;
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng(derive_seed(split.seed, "split", rep * 1000003ULL + attempt));
      s = random_split(n, split, rng);
      std::set<int> seen;
      for (std::size_t v : s.train) seen.insert(labels[v]);
      if (seen == present) break;
      ++result.resampled_splits;
      if (attempt >= 1000) throw DataError("could not draw a training split containing every class");
    }
    const LogisticProbe model = train_probe(embeddings, labels, s.train, C, probe);
    Matrix test(static_cast<Eigen::Index>(s.test.size()), embeddings.cols());
    for (std::size_t r = 0; r < s.test.size(); ++r) test.row(static_cast<Eigen::Index>(r)) = embeddings.row(s.test[r]);
    const std::vector<int> pred = model.predict(test);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < s.test.size(); ++r) correct += pred[r] == labels[s.test[r]] ? 1 : 0;
    result.accuracies.push_back(s.test.empty() ? 0.0
                                               : static_cast<double>(correct) / static_cast<double>(s.test.size()));
  }
  result.mean = mean_of(result.accuracies);
  result.std = population_std(result.accuracies, result.mean);
  return result;
}

EvalResult node_classification_accuracy(const Graph& graph, const EncoderParams& params, const SplitSpec& split,
                                        const ProbeHyper& probe) {
  if (!graph.labels) throw ContractError("node classification needs labels");
  const Matrix emb = gcn_forward(params, graph.adjacency.dense(), graph.features);
  return evaluate_embeddings(emb, *graph.labels, split, probe);
}

EvalResult train_and_evaluate(const Graph& graph, const TrainConfig& train, const AugmentationConfig& aug,
                              const SplitSpec& split, const ProbeHyper& probe) {
  const TrainResult trained = train_encoder(graph, train, aug);
  return node_classification_accuracy(graph, trained.params, split, probe);
}

EdgeDelta modification_stats(const Graph& clean, const Graph& modified) {
  return edge_set_delta(clean.adjacency, modified.adjacency);
}

namespace {

SimilarityClassStats summarize(const std::vector<double>& sims) {
  SimilarityClassStats s;
  s.count = sims.size();
  s.mean = mean_of(sims);
  s.std = population_std(sims, s.mean);
  return s;
}

void fill_histogram(SimilarityClassStats& s, const std::vector<double>& sims, double lo, double hi, std::size_t bins) {
  s.histogram.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : sims) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
    s.histogram[std::min(b, bins - 1)] += 1;
  }
}

}  // namespace

SimilarityStats similarity_stats(const Graph& clean, const Graph& poisoned, std::size_t bins) {
  if (clean.num_nodes() != poisoned.num_nodes()) throw ContractError("graphs differ in node count");
  if (bins == 0) throw ContractError("histogram needs at least one bin");
  std::vector<double> kept;
  std::vector<double> adversarial;
  for (const auto& [i, j] : poisoned.adjacency.edges()) {
    const double sim = cosine_similarity(poisoned.features, i, j);
    (clean.adjacency.has_edge(i, j) ? kept : adversarial).push_back(sim);
  }
  SimilarityStats stats;
  stats.bins = bins;
  stats.clean = summarize(kept);
  stats.adversarial = summarize(adversarial);
  std::vector<double> all = kept;
  all.insert(all.end(), adversarial.begin(), adversarial.end());
  if (!all.empty()) {
    stats.bin_min = *std::min_element(all.begin(), all.end());
    stats.bin_max = *std::max_element(all.begin(), all.end());
  }
  fill_histogram(stats.clean, kept, stats.bin_min, stats.bin_max, bins);
  fill_histogram(stats.adversarial, adversarial, stats.bin_min, stats.bin_max, bins);
  return stats;
}

std::optional<double> pruned_edge_precision(const SanitizeReport& report, const Graph& clean, const Graph& poisoned) {
  std::size_t pruned = 0;
  std::size_t hits = 0;
  const std::size_t upto = std::min(report.returned_modifications, report.modifications.size());
  for (std::size_t k = 0; k < upto; ++k) {
    const Modification& m = report.modifications[k];
    if (m.action != EdgeAction::deleted) continue;
    ++pruned;
    if (poisoned.adjacency.has_edge(m.i, m.j) && !clean.adjacency.has_edge(m.i, m.j)) ++hits;
  }
  if (pruned == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(pruned);
}

std::optional<SanitizerEngine> parse_engine(const std::string& name) {
  if (name == "edgepruner") return SanitizerEngine::edgepruner;
  if (name == "edgepruner-nf") return SanitizerEngine::edgepruner_nf;
  if (name == "baseline") return SanitizerEngine::baseline;
  if (name == "baseline-nf") return SanitizerEngine::baseline_nf;
  if (name == "edgemodifier") return SanitizerEngine::edgemodifier;
  return std::nullopt;
}

std::string to_string(SanitizerEngine engine) {
  switch (engine) {
    case SanitizerEngine::edgepruner: return "edgepruner";
    case SanitizerEngine::edgepruner_nf: return "edgepruner-nf";
    case SanitizerEngine::baseline: return "baseline";
    case SanitizerEngine::baseline_nf: return "baseline-nf";
    case SanitizerEngine::edgemodifier: return "edgemodifier";
  }
  return "unknown";
}

std::vector<std::string> engine_names() {
  return {"edgepruner", "edgepruner-nf", "baseline", "baseline-nf", "edgemodifier"};
}

std::pair<Graph, SanitizeReport> run_sanitizer(SanitizerEngine engine, const Graph& graph, PrunerConfig cfg,
                                               double add_probability, const TrainConfig& train,
                                               const AugmentationConfig& aug) {
  switch (engine) {
    case SanitizerEngine::edgepruner:
      cfg.use_feature_similarity = true;
      return edgepruner_sanitize(graph, cfg, train, aug);
    case SanitizerEngine::edgepruner_nf:
      cfg.use_feature_similarity = false;
      return edgepruner_sanitize(graph, cfg, train, aug);
    case SanitizerEngine::baseline:
      cfg.use_feature_similarity = true;
      return baseline_prune(graph, cfg, train, aug);
    case SanitizerEngine::baseline_nf:
      cfg.use_feature_similarity = false;
      return baseline_prune(graph, cfg, train, aug);
    case SanitizerEngine::edgemodifier:
      return edgemodifier_sanitize(graph, cfg, add_probability, train, aug);
  }
  throw ContractError("unknown sanitizer engine");
}

std::vector<SweepRow> pruning_sweep(const Graph& graph, const std::vector<double>& rates, SanitizerEngine engine,
                                    const PrunerConfig& cfg, double add_probability, const TrainConfig& train,
                                    const AugmentationConfig& aug, const SplitSpec& split, const ProbeHyper& probe) {
  std::vector<SweepRow> rows;
  rows.reserve(rates.size());
  for (double rate : rates) {
    PrunerConfig point = cfg;
    point.max_prune_fraction = rate;
    auto [sanitized, report] = run_sanitizer(engine, graph, point, add_probability, train, aug);
    SweepRow row;
    row.rate = rate;
    row.eval = train_and_evaluate(sanitized, train, aug, split, probe);
    row.min_loss = report.min_loss;
    row.realized_rate = report.realized_rate();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_eval_csv(const EvalResult& result, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "split_index,accuracy\n";
  for (std::size_t k = 0; k < result.accuracies.size(); ++k) out << k << ',' << result.accuracies[k] << '\n';
  out << "mean," << result.mean << '\n';
  out << "std," << result.std << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "rate,mean_acc,std_acc,l_min,realized_prune_rate\n";
  for (const SweepRow& r : rows) {
    out << r.rate << ',' << r.eval.mean << ',' << r.eval.std << ',';
    if (r.min_loss) out << *r.min_loss;
    out << ',' << r.realized_rate << '\n';
  }
}

nlohmann::json similarity_stats_to_json(const SimilarityStats& stats) {
  auto cls = [](const SimilarityClassStats& s) {
    nlohmann::json j = {{"count", s.count}, {"histogram", s.histogram}};
    if (s.count == 0) {
      j["mean"] = nullptr;
      j["std"] = nullptr;
      j["empty"] = true;
    } else {
      j["mean"] = s.mean;
      j["std"] = s.std;
      j["empty"] = false;
    }
    return j;
  };
  return {{"clean_edges", cls(stats.clean)},
          {"adversarial_edges", cls(stats.adversarial)},
          {"bins", stats.bins},
          {"bin_min", stats.bin_min},
          {"bin_max", stats.bin_max}};
}

}  // namespace edgeprune
