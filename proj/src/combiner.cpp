#include "estc/combiner.hpp"

#include <algorithm>
#include <string>

#include "estc/errors.hpp"

namespace estc {

DenseMatrix range_pseudoinverse(const DenseMatrix& x, const DenseMatrix& range,
                                double rcond_threshold, double* rcond_out) {
  // Orthonormal basis of the range from the projector's unit eigenvalues.
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> projector_eig(range);
  const auto& values = projector_eig.eigenvalues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) > 0.5) ++rank;
  const DenseMatrix basis = projector_eig.eigenvectors().rightCols(rank);
  if (rank == 0) {
    if (rcond_out) *rcond_out = 1.0;
    return DenseMatrix::Zero(x.rows(), x.cols());
  }

  // rank x rank Hermitian core; invert through its spectrum.
  const DenseMatrix core = basis.adjoint() * x * basis;
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> core_eig(0.5 * (core + core.adjoint()));
  const auto& lambda = core_eig.eigenvalues();
  // Scale is at least 1, the norm of the range projector itself.
  const double largest = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const double smallest = lambda.cwiseAbs().minCoeff();
  const double rcond = smallest / largest;
  if (rcond_out) *rcond_out = rcond;
  if (!(rcond >= rcond_threshold)) {
    throw DegenerateOverlap("range-restricted matrix is singular (rcond " +
                                std::to_string(rcond) + ")",
                            rcond);
  }
  const DenseMatrix core_inv = core_eig.eigenvectors() *
                               lambda.cwiseInverse().asDiagonal() *
                               core_eig.eigenvectors().adjoint();
  return basis * core_inv * basis.adjoint();
}

PairProjector combine_pair(const DenseMatrix& alpha, const DenseMatrix& beta,
                           double rcond_threshold) {
  PairProjector out;
  out.gamma = range_pseudoinverse(beta - beta * alpha * beta, beta, rcond_threshold, &out.rcond);
  const DenseMatrix diff = beta - alpha;
  out.delta = diff * out.gamma * diff;
  out.projector = alpha + out.delta;
  return out;
}

}  // namespace estc
