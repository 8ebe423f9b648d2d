#include "edgeprune/numerics.hpp"

#include <cmath>
#include <string>

#include "edgeprune/errors.hpp"
#include "edgeprune/rng.hpp"

namespace edgeprune {

namespace {

void require_finite(const Matrix& m, const char* stage) {
  if (!m.allFinite()) throw NumericalError(std::string("non-finite values in ") + stage);
}

void check_shapes(const EncoderParams& params, const Matrix& adjacency, const Matrix& features) {
  if (adjacency.rows() != adjacency.cols()) throw ContractError("adjacency must be square");
  if (features.rows() != adjacency.rows()) {
    throw ContractError("features have " + std::to_string(features.rows()) + " rows, adjacency has " +
                        std::to_string(adjacency.rows()));
  }
  if (features.cols() != params.w1.rows()) {
    throw ContractError("feature dim " + std::to_string(features.cols()) + " does not match w1 rows " +
                        std::to_string(params.w1.rows()));
  }
  if (params.w1.cols() != params.w2.rows()) throw ContractError("w1 columns must equal w2 rows");
}

struct ForwardCache {
  Vector degree;
  Matrix norm_adj;
  Matrix xw1;  // X W1
  Matrix z1;   // Â X W1
  Matrix h1;   // relu(z1)
  Matrix hw2;  // h1 W2
  Matrix out;  // Â h1 W2
};

ForwardCache forward(const EncoderParams& params, const GraphView& view) {
  check_shapes(params, view.adjacency, view.features);
  ForwardCache c;
  const auto n = view.adjacency.rows();
  Matrix tilde = view.adjacency + Matrix::Identity(n, n);
  c.degree = tilde.rowwise().sum();
  if ((c.degree.array() <= 0.0).any()) throw NumericalError("non-positive degree in normalization");
  Vector inv_sqrt = c.degree.cwiseSqrt().cwiseInverse();
  c.norm_adj = inv_sqrt.asDiagonal() * tilde * inv_sqrt.asDiagonal();
  require_finite(c.norm_adj, "normalization");
  c.xw1 = view.features * params.w1;
  c.z1 = c.norm_adj * c.xw1;
  c.h1 = c.z1.cwiseMax(0.0);
  require_finite(c.h1, "hidden layer");
  c.hw2 = c.h1 * params.w2;
  c.out = c.norm_adj * c.hw2;
  require_finite(c.out, "output layer");
  return c;
}

struct Unit {
  Matrix rows;
  Vector norms;
};

Unit unit_rows(const Matrix& h) {
  Unit u{h, h.rowwise().norm()};
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    if (u.norms(i) > 0.0) {
      u.rows.row(i) /= u.norms(i);
    } else {
      u.rows.row(i).setZero();
    }
  }
  return u;
}

// Pulls a gradient on unit rows back to the raw rows; zero rows get zero.
Matrix unit_backward(const Unit& u, const Matrix& d_unit) {
  Matrix out(d_unit.rows(), d_unit.cols());
  for (Eigen::Index i = 0; i < d_unit.rows(); ++i) {
    if (u.norms(i) > 0.0) {
      const double proj = u.rows.row(i).dot(d_unit.row(i));
      out.row(i) = (d_unit.row(i) - proj * u.rows.row(i)) / u.norms(i);
    } else {
      out.row(i).setZero();
    }
  }
  return out;
}

struct ContrastiveTerms {
  double loss = 0.0;
  Matrix grad1;
  Matrix grad2;
};

// Per-anchor NT-Xent: logits are the cross-view row (positive at the diagonal)
// plus the intra-view row without the diagonal. Writes softmax weights into
// `cross_w` / `intra_w` and returns the summed per-anchor losses.
double anchor_terms(const Matrix& cross, const Matrix& intra, Matrix& cross_w, Matrix& intra_w) {
  const auto n = cross.rows();
  cross_w.resize(n, n);
  intra_w.resize(n, n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = cross.row(i).maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) m = std::max(m, intra(i, j));
    double z = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      z += std::exp(cross(i, j) - m);
      if (j != i) z += std::exp(intra(i, j) - m);
    }
    const double lse = m + std::log(z);
    total += lse - cross(i, i);
    for (Eigen::Index j = 0; j < n; ++j) {
      cross_w(i, j) = std::exp(cross(i, j) - lse);
      intra_w(i, j) = (j == i) ? 0.0 : std::exp(intra(i, j) - lse);
    }
  }
  return total;
}

ContrastiveTerms contrastive_terms(const Matrix& h1, const Matrix& h2, double tau, bool want_grad) {
  if (!(tau > 0.0)) throw ContractError("temperature tau must be positive");
  if (h1.rows() != h2.rows() || h1.cols() != h2.cols()) throw ContractError("embedding shapes differ");
  if (h1.rows() == 0) throw ContractError("contrastive loss needs at least one node");
  const Unit u = unit_rows(h1);
  const Unit v = unit_rows(h2);
  const Matrix s12 = (u.rows * v.rows.transpose()) / tau;
  const Matrix s11 = (u.rows * u.rows.transpose()) / tau;
  const Matrix s22 = (v.rows * v.rows.transpose()) / tau;
  const Matrix s21 = s12.transpose();

  Matrix a, b, c, e;
  const double sum1 = anchor_terms(s12, s11, a, b);
  const double sum2 = anchor_terms(s21, s22, c, e);
  const double n = static_cast<double>(h1.rows());
  ContrastiveTerms out;
  out.loss = (sum1 + sum2) / (2.0 * n);
  if (!std::isfinite(out.loss)) throw NumericalError("non-finite values in contrastive loss");
  if (!want_grad) return out;

  const double k = 1.0 / (2.0 * n);
  const Matrix eye = Matrix::Identity(h1.rows(), h1.rows());
  const Matrix g12 = k * (a + c.transpose() - 2.0 * eye);
  const Matrix g11 = k * b;
  const Matrix g22 = k * e;
  const Matrix du = (g12 * v.rows + (g11 + g11.transpose()) * u.rows) / tau;
  const Matrix dv = (g12.transpose() * u.rows + (g22 + g22.transpose()) * v.rows) / tau;
  out.grad1 = unit_backward(u, du);
  out.grad2 = unit_backward(v, dv);
  return out;
}

struct ViewGrads {
  Matrix grad_w1;
  Matrix grad_w2;
  Matrix adjacency_grad;
};

ViewGrads backward(const EncoderParams& params, const GraphView& view, const ForwardCache& c, const Matrix& d_out,
                   bool with_adjacency) {
  ViewGrads g;
  const Matrix d_hw2 = c.norm_adj.transpose() * d_out;
  g.grad_w2 = c.h1.transpose() * d_hw2;
  Matrix d_z1 = d_hw2 * params.w2.transpose();
  d_z1.array() *= (c.z1.array() > 0.0).cast<double>();
  const Matrix d_xw1 = c.norm_adj.transpose() * d_z1;
  g.grad_w1 = view.features.transpose() * d_xw1;

  if (with_adjacency) {
    // dL/dÂ, then through Â_ij = Ã_ij r_i r_j with r = deg^-1/2 (row sums).
    const Matrix m = d_out * c.hw2.transpose() + d_z1 * c.xw1.transpose();
    const Vector r = c.degree.cwiseSqrt().cwiseInverse();
    const Matrix weighted = m.cwiseProduct(c.norm_adj);
    const Vector corr = (weighted.rowwise().sum() + weighted.colwise().sum().transpose()).cwiseQuotient(2.0 * c.degree);
    g.adjacency_grad = r.asDiagonal() * m * r.asDiagonal();
    g.adjacency_grad.colwise() -= corr;
  }
  return g;
}

}  // namespace

EncoderParams init_encoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t embed_dim, std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0 || embed_dim == 0) throw ContractError("encoder dimensions must be positive");
  Rng rng(seed);
  auto glorot = [&rng](std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix m(fan_in, fan_out);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(-limit, limit);
    return m;
  };
  EncoderParams p;
  p.w1 = glorot(input_dim, hidden_dim);
  p.w2 = glorot(hidden_dim, embed_dim);
  return p;
}

Matrix normalize_relaxed(const Matrix& adjacency) {
  const auto n = adjacency.rows();
  Matrix tilde = adjacency + Matrix::Identity(n, n);
  Vector inv_sqrt = tilde.rowwise().sum().cwiseSqrt().cwiseInverse();
  return inv_sqrt.asDiagonal() * tilde * inv_sqrt.asDiagonal();
}

Matrix gcn_forward(const EncoderParams& params, const Matrix& adjacency, const Matrix& features) {
  return forward(params, GraphView{adjacency, features}).out;
}

double contrastive_loss(const Matrix& h1, const Matrix& h2, double tau) {
  return contrastive_terms(h1, h2, tau, false).loss;
}

LossGrads loss_and_grads(const EncoderParams& params, const GraphView& view1, const GraphView& view2, double tau,
                         bool with_adjacency_grad) {
  const ForwardCache c1 = forward(params, view1);
  const ForwardCache c2 = forward(params, view2);
  const ContrastiveTerms terms = contrastive_terms(c1.out, c2.out, tau, true);
  require_finite(terms.grad1, "contrastive loss gradient");
  require_finite(terms.grad2, "contrastive loss gradient");

  ViewGrads g1 = backward(params, view1, c1, terms.grad1, with_adjacency_grad);
  ViewGrads g2 = backward(params, view2, c2, terms.grad2, with_adjacency_grad);

  LossGrads out;
  out.loss = terms.loss;
  out.grad_w1 = g1.grad_w1 + g2.grad_w1;
  out.grad_w2 = g1.grad_w2 + g2.grad_w2;
  require_finite(out.grad_w1, "weight gradient (layer 1)");
  require_finite(out.grad_w2, "weight gradient (layer 2)");
  if (with_adjacency_grad) {
    out.adjacency_grad[0] = std::move(g1.adjacency_grad);
    out.adjacency_grad[1] = std::move(g2.adjacency_grad);
    require_finite(out.adjacency_grad[0], "adjacency gradient (view 1)");
    require_finite(out.adjacency_grad[1], "adjacency gradient (view 2)");
  }
  return out;
}

void AdamHyper::validate() const {
  if (!(lr > 0.0)) throw ContractError("Adam lr must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) throw ContractError("Adam betas must lie in (0,1)");
  if (!(eps > 0.0)) throw ContractError("Adam eps must be positive");
}

AdamState AdamState::zeros_like(const EncoderParams& params) {
  AdamState s;
  s.m1 = Matrix::Zero(params.w1.rows(), params.w1.cols());
  s.v1 = s.m1;
  s.m2 = Matrix::Zero(params.w2.rows(), params.w2.cols());
  s.v2 = s.m2;
  return s;
}

void adam_step(EncoderParams& params, const Matrix& grad_w1, const Matrix& grad_w2, AdamState& state,
               const AdamHyper& hyper) {
  if (grad_w1.rows() != params.w1.rows() || grad_w1.cols() != params.w1.cols() ||
      grad_w2.rows() != params.w2.rows() || grad_w2.cols() != params.w2.cols()) {
    throw ContractError("gradient shapes do not match encoder parameters");
  }
  if (state.m1.size() != params.w1.size() || state.m2.size() != params.w2.size()) {
    throw ContractError("Adam state shapes do not match encoder parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(hyper.beta1, t);
  const double bc2 = 1.0 - std::pow(hyper.beta2, t);
  auto update = [&](Matrix& w, const Matrix& g, Matrix& m, Matrix& v) {
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * g.cwiseProduct(g);
    w.array() -= hyper.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + hyper.eps);
  };
  update(params.w1, grad_w1, state.m1, state.v1);
  update(params.w2, grad_w2, state.m2, state.v2);
}

}  // namespace edgeprune
