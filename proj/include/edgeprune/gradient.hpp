#pragma once

#include <cstddef>

#include "edgeprune/graph.hpp"
#include "edgeprune/numerics.hpp"
#include "edgeprune/rng.hpp"
#include "edgeprune/train.hpp"

namespace edgeprune {

/// Sums the adjacency gradient of the contrastive loss over `draws`
/// augmentation draws and both views, then returns (G + G^T) / 2.
///
/// A view in which an edge was dropped contributes nothing to that entry;
/// entries that are absent in the source graph keep their view gradient.
/// Shared by the attack and all sanitizers.
Matrix accumulate_adjacency_gradient(const Adjacency& adjacency, const Matrix& features, const EncoderParams& params,
                                     std::size_t draws, const AugmentationConfig& aug, double tau, Rng& rng);

}  // namespace edgeprune
