#pragma once

// Projector of a pair of homogeneous systems alpha x = 0, beta x = 0 on a
// finite-dimensional space, built through a pseudoinverse instead of the
// alternating series
//   A = alpha + beta + sum_k [(ab)^k a - (ab)^k + (ba)^k b - (ba)^k].
// Closed form: A = alpha + delta, delta = (beta - alpha) gamma (beta - alpha),
// gamma = (beta - beta alpha beta)^-.

#include <Eigen/Dense>

namespace estc {

using DenseMatrix = Eigen::MatrixXcd;

// Reciprocal condition below which a range-restricted inverse is refused.
inline constexpr double kDefaultRcondThreshold = 1e-10;

// Inverse of `x` restricted to the range of the orthogonal projector
// `range`: returns y with y x = x y = range and range y = y range = y.
// `x` must be Hermitian and map range(range) into itself. Throws
// DegenerateOverlap when the restricted matrix has reciprocal condition
// below `rcond_threshold`.
DenseMatrix range_pseudoinverse(const DenseMatrix& x, const DenseMatrix& range,
                                double rcond_threshold = kDefaultRcondThreshold,
                                double* rcond_out = nullptr);

struct PairProjector {
  DenseMatrix projector;  // A
  DenseMatrix gamma;      // (beta - beta alpha beta)^-
  DenseMatrix delta;      // A - alpha
  double rcond = 0.0;     // of the beta-range core
};

// Throws DegenerateOverlap when the ranges of alpha and beta intersect (or
// nearly so); no regularization is attempted.
PairProjector combine_pair(const DenseMatrix& alpha, const DenseMatrix& beta,
                           double rcond_threshold = kDefaultRcondThreshold);

}  // namespace estc
