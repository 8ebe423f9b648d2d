#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "edgeprune/matrix.hpp"

namespace edgeprune {

/// Weights of the two-layer GCN encoder: w1 is d x h, w2 is h x e.
struct EncoderParams {
  Matrix w1;
  Matrix w2;

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t embed_dim() const { return static_cast<std::size_t>(w2.cols()); }

  friend bool operator==(const EncoderParams& a, const EncoderParams& b) { return a.w1 == b.w1 && a.w2 == b.w2; }
};

/// Glorot-uniform initialization, U(-sqrt(6/(fan_in+fan_out)), +sqrt(...)).
EncoderParams init_encoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t embed_dim, std::uint64_t seed);

/// One augmented (or plain) copy of a graph fed to the encoder. The adjacency
/// may hold any reals in [0,1] when differentiating; it is not validated here.
struct GraphView {
  Matrix adjacency;
  Matrix features;
};

/// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I; no binary/symmetry check.
Matrix normalize_relaxed(const Matrix& adjacency);

/// Â relu(Â X W1) W2: ReLU on the hidden layer, identity output.
Matrix gcn_forward(const EncoderParams& params, const Matrix& adjacency, const Matrix& features);

/// Symmetrized NT-Xent over two embedding matrices with cosine similarity.
/// Zero-norm rows have cosine 0 with everything.
double contrastive_loss(const Matrix& h1, const Matrix& h2, double tau);

struct LossGrads {
  double loss = 0.0;
  Matrix grad_w1;
  Matrix grad_w2;
  /// dL/dA for the adjacency of each view, chained through the degree
  /// normalization. Empty when adjacency gradients were not requested.
  std::array<Matrix, 2> adjacency_grad;
};

/// Contrastive loss of the encoder on two views plus its gradients with
/// respect to both weight matrices and (optionally) both view adjacencies.
/// Throws NumericalError naming the stage if any intermediate is non-finite.
LossGrads loss_and_grads(const EncoderParams& params, const GraphView& view1, const GraphView& view2, double tau,
                         bool with_adjacency_grad = true);

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

struct AdamState {
  Matrix m1, v1, m2, v2;
  std::uint64_t step = 0;

  static AdamState zeros_like(const EncoderParams& params);
};

/// Bias-corrected Adam update of both weight matrices in place.
void adam_step(EncoderParams& params, const Matrix& grad_w1, const Matrix& grad_w2, AdamState& state,
               const AdamHyper& hyper);

}  // namespace edgeprune
