#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "ensembed/types.hpp"

namespace ensembed {

template <typename Scalar>
struct EconomySvd {
  MatX<Scalar> P;      // p x r, orthonormal columns
  VecX<Scalar> sigma;  // length r, non-negative, non-increasing
  MatX<Scalar> Z;      // q x r, orthonormal columns
};

/// Thin SVD A = P * diag(sigma) * Z^T with r = min(p, q).
template <typename Derived>
EconomySvd<typename Derived::Scalar> economy_svd(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const MatX<Scalar> dense = a;
  if (!dense.allFinite())
    throw std::invalid_argument("economy_svd: input has non-finite entries");
  Eigen::BDCSVD<MatX<Scalar>> svd(dense,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

/// Moore-Penrose solve X = A^+ * B for symmetric positive semidefinite A,
/// dropping eigenvalues below tol_rel times the largest one.
template <typename Scalar, typename DerivedB>
MatX<Scalar> pinv_solve_spd(const MatX<Scalar>& a,
                            const Eigen::MatrixBase<DerivedB>& b,
                            Scalar tol_rel = Scalar(1e-12)) {
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> eig(a);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("pinv_solve_spd: eigendecomposition failed");
  const VecX<Scalar>& w = eig.eigenvalues();  // ascending
  const Scalar wmax = w.size() ? w.cwiseAbs().maxCoeff() : Scalar(0);
  const Scalar cutoff = tol_rel * wmax;
  VecX<Scalar> inv = VecX<Scalar>::Zero(w.size());
  for (Index i = 0; i < w.size(); ++i)
    if (w(i) > cutoff) inv(i) = Scalar(1) / w(i);
  return eig.eigenvectors() * inv.asDiagonal() *
         (eig.eigenvectors().transpose() * b);
}

/// Orthonormal basis of the column space (thin Q of a Householder QR).
template <typename Scalar>
MatX<Scalar> orthonormal_columns(const MatX<Scalar>& a) {
  Eigen::HouseholderQR<MatX<Scalar>> qr(a);
  MatX<Scalar> q = qr.householderQ() * MatX<Scalar>::Identity(a.rows(), a.cols());
  return q;
}

} // namespace ensembed
