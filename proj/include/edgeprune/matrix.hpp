#pragma once

#include <Eigen/Dense>

namespace edgeprune {

/// Dense row-major real matrix used for adjacency, features, weights and gradients.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace edgeprune
