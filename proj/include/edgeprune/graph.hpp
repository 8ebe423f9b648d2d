#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "edgeprune/matrix.hpp"

namespace edgeprune {

using Edge = std::pair<std::size_t, std::size_t>;

/// Symmetric binary adjacency with an empty diagonal.
///
/// Stored dense as doubles so it feeds the encoder kernels directly. Every
/// mutation touches both (i, j) and (j, i); edge counts are undirected.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t n) : data_(Matrix::Zero(n, n)) {}

  /// Validates symmetry, binary entries and zero diagonal; throws ContractError.
  static Adjacency from_dense(const Matrix& dense);
  static Adjacency from_edges(std::size_t n, const std::vector<Edge>& edges);

  std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }
  bool has_edge(std::size_t i, std::size_t j) const { return data_(i, j) != 0.0; }
  void set_edge(std::size_t i, std::size_t j, bool present);

  std::size_t edge_count() const;
  /// Undirected edges as (i, j) with i < j in lexicographic order.
  std::vector<Edge> edges() const;
  std::vector<std::size_t> degrees() const;

  const Matrix& dense() const { return data_; }

  friend bool operator==(const Adjacency& a, const Adjacency& b) { return a.data_ == b.data_; }

 private:
  Matrix data_;
};

struct Graph {
  Adjacency adjacency;
  Matrix features;
  /// Class index per node; consumed by evaluation only.
  std::optional<std::vector<int>> labels;

  std::size_t num_nodes() const { return adjacency.size(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t num_classes() const;

  /// Checks shape agreement, finite features and label range; throws ContractError.
  void validate() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.adjacency == b.adjacency && a.features == b.features && a.labels == b.labels;
  }
};

/// D^-1/2 (A + I) D^-1/2 for a validated binary symmetric adjacency.
/// Throws ContractError on non-symmetric or non-binary input.
Matrix normalize_adjacency(const Matrix& adjacency);

/// Cosine of feature rows i and j; 0 when either row has zero norm.
double cosine_similarity(const Matrix& features, std::size_t i, std::size_t j);

/// Mean cosine similarity over connected ordered pairs; 0 for an edgeless graph.
double mean_neighbor_similarity(const Graph& graph);

struct EdgeDelta {
  std::size_t added = 0;
  std::size_t deleted = 0;
  friend bool operator==(const EdgeDelta&, const EdgeDelta&) = default;
};

/// Undirected edges present only in `b` (added) and only in `a` (deleted).
EdgeDelta edge_set_delta(const Adjacency& a, const Adjacency& b);

struct SBMParams {
  std::size_t communities = 4;
  std::size_t nodes_per_block = 25;
  double p_in = 0.3;
  double p_out = 0.02;
  std::size_t feature_dim = 32;
  double feature_noise = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Stochastic block model with non-negative block-prototype features.
Graph generate_sbm(const SBMParams& params);

/// Induced subgraph on `count` nodes drawn uniformly without replacement.
/// Node order in the result follows the original indices.
Graph subsample_nodes(const Graph& graph, std::size_t count, std::uint64_t seed);

/// floor(fraction * edges) with a small tolerance for decimal fractions such
/// as 0.07 whose binary product lands just below an integer.
std::size_t edge_budget(double fraction, std::size_t edges);

}  // namespace edgeprune
