#include "edgeprune/gradient.hpp"

#include <string>

#include "edgeprune/errors.hpp"

namespace edgeprune {

Matrix accumulate_adjacency_gradient(const Adjacency& adjacency, const Matrix& features, const EncoderParams& params,
                                     std::size_t draws, const AugmentationConfig& aug, double tau, Rng& rng) {
  if (draws == 0) throw ContractError("gradient accumulation needs at least one draw");
  const Graph source{adjacency, features, std::nullopt};
  const Matrix& src = adjacency.dense();
  const auto n = src.rows();
  Matrix total = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < draws; ++k) {
    const GraphView v1 = augment(source, aug.view1, aug.per_entry_feature_mask, rng);
    const GraphView v2 = augment(source, aug.view2, aug.per_entry_feature_mask, rng);
    LossGrads g;
    try {
      g = loss_and_grads(params, v1, v2, tau, true);
    } catch (const NumericalError& e) {
      throw NumericalError("gradient draw " + std::to_string(k) + ": " + e.what());
    }
    const GraphView* views[2] = {&v1, &v2};
    for (int m = 0; m < 2; ++m) {
      // Keep entries that are non-edges in the source or survived the drop.
      const auto kept = (src.array() == 0.0 || views[m]->adjacency.array() != 0.0).cast<double>();
      total.array() += g.adjacency_grad[m].array() * kept;
    }
  }
  Matrix sym = 0.5 * (total + total.transpose());
  if (!sym.allFinite()) throw NumericalError("non-finite accumulated adjacency gradient");
  return sym;
}

}  // namespace edgeprune
