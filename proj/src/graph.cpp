#include "edgeprune/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgeprune/errors.hpp"
#include "edgeprune/rng.hpp"

namespace edgeprune {

namespace {

std::string pair_str(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_adjacency(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw ContractError("adjacency must be square, got " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
  }
  const auto n = static_cast<std::size_t>(a.rows());
  for (std::size_t i = 0; i < n; ++i) {
    if (a(i, i) != 0.0) throw ContractError("adjacency has a self-loop at node " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a(i, j);
      if (v != 0.0 && v != 1.0) throw ContractError("adjacency entry " + pair_str(i, j) + " is not binary");
      if (v != a(j, i)) throw ContractError("adjacency is not symmetric at " + pair_str(i, j));
    }
  }
}

}  // namespace

Adjacency Adjacency::from_dense(const Matrix& dense) {
  check_adjacency(dense);
  Adjacency adj;
  adj.data_ = dense;
  return adj;
}

Adjacency Adjacency::from_edges(std::size_t n, const std::vector<Edge>& edges) {
  Adjacency adj(n);
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) throw ContractError("edge " + pair_str(i, j) + " out of range for n=" + std::to_string(n));
    if (i == j) throw ContractError("self-loop " + pair_str(i, j));
    adj.set_edge(i, j, true);
  }
  return adj;
}

void Adjacency::set_edge(std::size_t i, std::size_t j, bool present) {
  if (i >= size() || j >= size()) throw ContractError("edge " + pair_str(i, j) + " out of range");
  if (i == j) throw ContractError("cannot set diagonal entry " + pair_str(i, j));
  const double v = present ? 1.0 : 0.0;
  data_(i, j) = v;
  data_(j, i) = v;
}

std::size_t Adjacency::edge_count() const {
  std::size_t count = 0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (data_(i, j) != 0.0) ++count;
  return count;
}

std::vector<Edge> Adjacency::edges() const {
  std::vector<Edge> out;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (data_(i, j) != 0.0) out.emplace_back(i, j);
  return out;
}

std::vector<std::size_t> Adjacency::degrees() const {
  std::vector<std::size_t> deg(size(), 0);
  for (const auto& [i, j] : edges()) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

std::size_t Graph::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels->begin(), labels->end())) + 1;
}

void Graph::validate() const {
  check_adjacency(adjacency.dense());
  if (static_cast<std::size_t>(features.rows()) != num_nodes()) {
    throw ContractError("feature matrix has " + std::to_string(features.rows()) + " rows for " +
                        std::to_string(num_nodes()) + " nodes");
  }
  if (!features.allFinite()) throw ContractError("feature matrix contains non-finite entries");
  if (labels) {
    if (labels->size() != num_nodes()) throw ContractError("label vector length does not match node count");
    for (int c : *labels)
      if (c < 0) throw ContractError("negative class label " + std::to_string(c));
  }
}

Matrix normalize_adjacency(const Matrix& adjacency) {
  check_adjacency(adjacency);
  const auto n = adjacency.rows();
  Matrix tilde = adjacency + Matrix::Identity(n, n);
  Vector inv_sqrt = tilde.rowwise().sum().cwiseSqrt().cwiseInverse();
  return inv_sqrt.asDiagonal() * tilde * inv_sqrt.asDiagonal();
}

double cosine_similarity(const Matrix& features, std::size_t i, std::size_t j) {
  const auto rows = static_cast<std::size_t>(features.rows());
  if (i >= rows || j >= rows) {
    throw ContractError("node index " + pair_str(i, j) + " out of range for " + std::to_string(rows) + " rows");
  }
  const double ni = features.row(i).norm();
  const double nj = features.row(j).norm();
  if (ni == 0.0 || nj == 0.0) return 0.0;
  return features.row(i).dot(features.row(j)) / (ni * nj);
}

double mean_neighbor_similarity(const Graph& graph) {
  const auto edges = graph.adjacency.edges();
  if (edges.empty()) return 0.0;
  // Ordered-pair sum is twice the undirected sum over twice the count.
  double sum = 0.0;
  for (const auto& [i, j] : edges) sum += cosine_similarity(graph.features, i, j);
  return sum / static_cast<double>(edges.size());
}

EdgeDelta edge_set_delta(const Adjacency& a, const Adjacency& b) {
  if (a.size() != b.size()) {
    throw ContractError("adjacency size mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  EdgeDelta delta;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool in_a = a.has_edge(i, j);
      const bool in_b = b.has_edge(i, j);
      if (in_b && !in_a) ++delta.added;
      if (in_a && !in_b) ++delta.deleted;
    }
  }
  return delta;
}

void SBMParams::validate() const {
  if (communities == 0) throw ContractError("SBM needs at least one block");
  if (nodes_per_block == 0) throw ContractError("SBM needs at least one node per block");
  if (feature_dim == 0) throw ContractError("SBM feature_dim must be positive");
  if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0)) {
    throw ContractError("SBM probabilities must lie in [0,1]");
  }
  if (!(feature_noise >= 0.0) || !std::isfinite(feature_noise)) throw ContractError("SBM feature_noise must be >= 0");
}

Graph generate_sbm(const SBMParams& params) {
  params.validate();
  const std::size_t n = params.communities * params.nodes_per_block;
  const std::size_t d = params.feature_dim;
  Rng rng(params.seed);

  std::vector<int> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<int>(v / params.nodes_per_block);

  Adjacency adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? params.p_in : params.p_out;
      if (rng.bernoulli(p)) adj.set_edge(i, j, true);
    }
  }

  // Block b's prototype is an indicator over the feature columns k with
  // k % communities == b, a bag-of-words style "topic".
  Matrix features(n, d);
  for (std::size_t v = 0; v < n; ++v) {
    const auto block = static_cast<std::size_t>(labels[v]);
    for (std::size_t k = 0; k < d; ++k) {
      const double proto = (k % params.communities == block) ? 1.0 : 0.0;
      features(v, k) = std::max(0.0, proto + params.feature_noise * rng.normal());
    }
  }

  return Graph{std::move(adj), std::move(features), std::move(labels)};
}

Graph subsample_nodes(const Graph& graph, std::size_t count, std::uint64_t seed) {
  const std::size_t n = graph.num_nodes();
  if (count > n) {
    throw ContractError("subsample size " + std::to_string(count) + " exceeds node count " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  order.resize(count);
  std::sort(order.begin(), order.end());

  Graph out{Adjacency(count), Matrix(count, graph.features.cols()), std::nullopt};
  for (std::size_t a = 0; a < count; ++a) {
    out.features.row(a) = graph.features.row(order[a]);
    for (std::size_t b = a + 1; b < count; ++b)
      if (graph.adjacency.has_edge(order[a], order[b])) out.adjacency.set_edge(a, b, true);
  }
  if (graph.labels) {
    std::vector<int> labels(count);
    for (std::size_t a = 0; a < count; ++a) labels[a] = (*graph.labels)[order[a]];
    out.labels = std::move(labels);
  }
  return out;
}

std::size_t edge_budget(double fraction, std::size_t edges) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ContractError("budget fraction must lie in [0,1]");
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(edges) + 1e-9));
}

}  // namespace edgeprune
