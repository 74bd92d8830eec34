// Two-qubit entanglement measures: Wootters concurrence and negativity.
#ifndef SEQMEAS_ENTANGLEMENT_HPP
#define SEQMEAS_ENTANGLEMENT_HPP

#include "seqmeas/qcore.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <vector>

namespace seqmeas {

/// Eigenvalues of a state below this are treated as negative, not roundoff.
inline constexpr double kEigenvalueFloor = -1e-10;

/// sigma_y (x) sigma_y
template <typename Real = double>
SquareMatrix<Real, 4> sigma_yy() {
  return tensor_product(pauli_y<Real>(), pauli_y<Real>());
}

/// rho~ = (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)
template <typename Real>
SquareMatrix<Real, 4> spin_flip(const DensityMatrix<Real, 4>& rho) {
  const SquareMatrix<Real, 4> yy = sigma_yy<Real>();
  return yy * rho.matrix().conjugate() * yy;
}

/// Wootters concurrence C = max(0, l1 - l2 - l3 - l4).
///
/// The l_i are the square roots of the eigenvalues of sqrt(rho) rho~ sqrt(rho),
/// equivalently the singular values of tau = W^T (sigma_y (x) sigma_y) W with
/// rho = W W^dagger, W = [sqrt(mu_k) v_k] over the eigenpairs of rho. The
/// singular values are taken directly so that rank-deficient states (every
/// pure or dephased singlet) do not pick up sqrt(roundoff) ~ 1e-8 errors.
/// Eigenvalues of rho at or below `rank_cutoff` are treated as exact zeros.
template <typename Real>
Real concurrence(const DensityMatrix<Real, 4>& rho, Real rank_cutoff = Real(1e-14)) {
  using C = std::complex<Real>;
  using Small = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

  const auto eig = hermitian_eigensystem<Real, 4>(rho.matrix());
  if (eig.values(0) < Real(kEigenvalueFloor))
    throw InvalidState("negative eigenvalue below -1e-10 in concurrence");

  std::vector<int> support;
  for (int k = 0; k < 4; ++k)
    if (eig.values(k) > rank_cutoff) support.push_back(k);
  if (support.empty()) return Real(0);

  const int rank = static_cast<int>(support.size());
  Small w(4, rank);
  for (int k = 0; k < rank; ++k)
    w.col(k) = std::sqrt(eig.values(support[k])) * eig.vectors.col(support[k]);

  const Small tau = w.transpose() * sigma_yy<Real>() * w;
  Eigen::JacobiSVD<Small> svd(tau);
  const auto sv = svd.singularValues();  // descending
  Real c = sv(0);
  for (int k = 1; k < sv.size(); ++k) c -= sv(k);
  return std::clamp(c, Real(0), Real(1));
}

/// Partial transpose over qubit B.
template <typename Real>
SquareMatrix<Real, 4> partial_transpose_b(const SquareMatrix<Real, 4>& rho) {
  SquareMatrix<Real, 4> out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2) out(2 * a + b, 2 * a2 + b2) = rho(2 * a + b2, 2 * a2 + b);
  return out;
}

/// Sum of |negative eigenvalues| of the partial transpose.
template <typename Real>
Real negativity(const DensityMatrix<Real, 4>& rho) {
  const auto eig = hermitian_eigensystem<Real, 4>(partial_transpose_b<Real>(rho.matrix()));
  Real sum = 0;
  for (int k = 0; k < 4; ++k)
    if (eig.values(k) < 0) sum -= eig.values(k);
  return sum;
}

}  // namespace seqmeas

#endif  // SEQMEAS_ENTANGLEMENT_HPP
