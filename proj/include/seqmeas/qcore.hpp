// Small fixed-dimension complex linear algebra for one and two qubits.
//
// Basis ordering for two qubits is {|00>, |01>, |10>, |11>} with qubit A as
// the leftmost (most significant) index.
#ifndef SEQMEAS_QCORE_HPP
#define SEQMEAS_QCORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace seqmeas {

template <typename Real, int Dim>
using SquareMatrix = Eigen::Matrix<std::complex<Real>, Dim, Dim>;

template <typename Real, int Dim>
using Ket = Eigen::Matrix<std::complex<Real>, Dim, 1>;

template <typename Real, int Dim>
using RealVector = Eigen::Matrix<Real, Dim, 1>;

using Matrix2 = SquareMatrix<double, 2>;
using Matrix4 = SquareMatrix<double, 4>;
using Ket2 = Ket<double, 2>;
using Ket4 = Ket<double, 4>;

enum class Qubit { A, B };

class InvalidState : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by the Hermitian eigensolver; carries the largest entry of |h - h^dagger|.
class NotHermitian : public std::invalid_argument {
 public:
  explicit NotHermitian(double asymmetry)
      : std::invalid_argument(message(asymmetry)), asymmetry_(asymmetry) {}
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  static std::string message(double asymmetry) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max |h - h^dagger| = " << asymmetry << ")";
    return os.str();
  }
  double asymmetry_;
};

// ---------------------------------------------------------------------------
// Pauli matrices

template <typename Real = double>
SquareMatrix<Real, 2> pauli_x() {
  SquareMatrix<Real, 2> m;
  m << 0, 1, 1, 0;
  return m;
}

template <typename Real = double>
SquareMatrix<Real, 2> pauli_y() {
  using C = std::complex<Real>;
  SquareMatrix<Real, 2> m;
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Real = double>
SquareMatrix<Real, 2> pauli_z() {
  SquareMatrix<Real, 2> m;
  m << 1, 0, 0, -1;
  return m;
}

// ---------------------------------------------------------------------------
// Kronecker product

/// Kronecker product with `a` on the leftmost index. Only the one- and
/// two-qubit dimensions are supported; larger products fail to compile.
template <typename DerivedA, typename DerivedB>
auto tensor_product(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  constexpr int kRowsA = DerivedA::RowsAtCompileTime;
  constexpr int kColsA = DerivedA::ColsAtCompileTime;
  constexpr int kRowsB = DerivedB::RowsAtCompileTime;
  constexpr int kColsB = DerivedB::ColsAtCompileTime;
  static_assert(kRowsA != Eigen::Dynamic && kRowsB != Eigen::Dynamic && kColsA != Eigen::Dynamic &&
                    kColsB != Eigen::Dynamic,
                "use the dynamic overload for runtime-sized operands");
  static_assert(kRowsA * kRowsB <= 4 && kColsA * kColsB <= 4,
                "tensor products are limited to two qubits");
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, kRowsA * kRowsB, kColsA * kColsB> out;
  for (int i = 0; i < kRowsA; ++i)
    for (int j = 0; j < kColsA; ++j)
      out.template block<kRowsB, kColsB>(i * kRowsB, j * kColsB) = a(i, j) * b;
  return out;
}

/// Runtime-sized variant; rejects results beyond the two-qubit dimension.
inline Eigen::MatrixXcd tensor_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > 4 || cols > 4) {
    std::ostringstream os;
    os << "tensor product of " << a.rows() << "x" << a.cols() << " and " << b.rows() << "x"
       << b.cols() << " exceeds the supported two-qubit dimension";
    throw UnsupportedDimension(os.str());
  }
  Eigen::MatrixXcd out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver

template <typename Real, int Dim>
struct EigenSystem {
  RealVector<Real, Dim> values;      // ascending
  SquareMatrix<Real, Dim> vectors;   // column k pairs with values(k)
  int sweeps = 0;
};

template <typename Real, int Dim>
Real max_asymmetry(const SquareMatrix<Real, Dim>& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

/// Cyclic complex Jacobi iteration. Rotations are applied in fixed (p < q)
/// order so identical inputs give bitwise-identical outputs. Iterates until the
/// off-diagonal Frobenius norm drops below tol * ||h||_F (100 sweeps max).
template <typename Real, int Dim>
EigenSystem<Real, Dim> hermitian_eigensystem(const SquareMatrix<Real, Dim>& h, Real tol = Real(1e-13)) {
  using C = std::complex<Real>;
  using Matrix = SquareMatrix<Real, Dim>;
  constexpr int kMaxSweeps = 100;

  const Real scale = std::max(Real(1), h.norm());
  const Real asym = max_asymmetry<Real, Dim>(h);
  if (!(asym <= tol * scale)) throw NotHermitian(static_cast<double>(asym));

  Matrix a = (h + h.adjoint()) * Real(0.5);
  Matrix v = Matrix::Identity();
  const Real target = tol * h.norm();

  auto off_norm = [&a] {
    Real s = 0;
    for (int p = 0; p < Dim; ++p)
      for (int q = 0; q < Dim; ++q)
        if (p != q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > target) {
    if (sweep == kMaxSweeps) throw NonConvergence("Jacobi eigensolver exceeded 100 sweeps");
    ++sweep;
    for (int p = 0; p < Dim - 1; ++p) {
      for (int q = p + 1; q < Dim; ++q) {
        const Real mag = std::abs(a(p, q));
        if (mag == Real(0)) continue;
        const C phase = a(p, q) / mag;
        const Real theta = (a(q, q).real() - a(p, p).real()) / (Real(2) * mag);
        const Real t = (theta >= 0 ? Real(1) : Real(-1)) / (std::abs(theta) + std::sqrt(theta * theta + Real(1)));
        const Real c = Real(1) / std::sqrt(t * t + Real(1));
        const Real s = t * c;
        // J = diag(1, .., e^{-i phi} at q, ..) * real rotation(p, q)
        Matrix j = Matrix::Identity();
        j(p, p) = c;
        j(p, q) = s;
        j(q, p) = -s * std::conj(phase);
        j(q, q) = c * std::conj(phase);
        a = (j.adjoint() * a * j).eval();
        a(p, q) = a(q, p) = C(0);
        v = (v * j).eval();
      }
    }
  }

  EigenSystem<Real, Dim> out;
  out.sweeps = sweep;
  std::array<int, Dim> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int l, int r) { return a(l, l).real() < a(r, r).real(); });
  for (int k = 0; k < Dim; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// States

/// Normalized state vector over one or two qubits.
template <typename Real, int Dim>
class PureState {
  static_assert(Dim == 2 || Dim == 4, "one or two qubits only");

 public:
  using Vector = Ket<Real, Dim>;

  explicit PureState(const Vector& amplitudes) : amplitudes_(amplitudes) {
    const Real norm2 = amplitudes_.squaredNorm();
    if (!(std::abs(norm2 - Real(1)) <= Real(1e-12)))
      throw InvalidState("pure state amplitudes are not normalized");
  }

  static PureState basis(int index) {
    Vector v = Vector::Zero();
    v(index) = 1;
    return PureState(v);
  }

  const Vector& amplitudes() const { return amplitudes_; }
  std::complex<Real> operator[](int i) const { return amplitudes_(i); }

 private:
  Vector amplitudes_;
};

using PureState2 = PureState<double, 2>;
using PureState4 = PureState<double, 4>;

/// Positive, unit-trace Hermitian matrix over one or two qubits. Validated
/// on construction: Hermitian and unit trace within 1e-12, eigenvalues >= -1e-10.
template <typename Real, int Dim>
class DensityMatrix {
  static_assert(Dim == 2 || Dim == 4, "one or two qubits only");

 public:
  using Matrix = SquareMatrix<Real, Dim>;
  static constexpr int dim = Dim;

  explicit DensityMatrix(const Matrix& m) : m_(m) {
    const Real asym = max_asymmetry<Real, Dim>(m_);
    if (!(asym <= Real(1e-12))) throw InvalidState("density matrix is not Hermitian");
    if (!(std::abs(m_.trace() - std::complex<Real>(1)) <= Real(1e-12)))
      throw InvalidState("density matrix trace differs from 1");
    m_ = ((m_ + m_.adjoint()) * Real(0.5)).eval();
    const auto eig = hermitian_eigensystem<Real, Dim>(m_);
    if (eig.values(0) < Real(-1e-10)) throw InvalidState("density matrix has a negative eigenvalue");
  }

  DensityMatrix(const PureState<Real, Dim>& psi)  // NOLINT: implicit by intent
      : m_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

  /// Rescales a positive matrix by its trace, then validates.
  static DensityMatrix normalized(const Matrix& unnormalized) {
    const Real tr = unnormalized.trace().real();
    if (!(tr > Real(0))) throw InvalidState("cannot normalize a matrix with non-positive trace");
    return DensityMatrix(unnormalized / tr);
  }

  static DensityMatrix maximally_mixed() { return DensityMatrix(Matrix::Identity() / Real(Dim)); }

  const Matrix& matrix() const { return m_; }
  std::complex<Real> operator()(int r, int c) const { return m_(r, c); }

 private:
  Matrix m_;
};

using DensityMatrix2 = DensityMatrix<double, 2>;
using DensityMatrix4 = DensityMatrix<double, 4>;

template <typename Real>
DensityMatrix<Real, 4> tensor_product(const DensityMatrix<Real, 2>& a, const DensityMatrix<Real, 2>& b) {
  return DensityMatrix<Real, 4>(tensor_product(a.matrix(), b.matrix()));
}

template <typename Real>
PureState<Real, 4> tensor_product(const PureState<Real, 2>& a, const PureState<Real, 2>& b) {
  return PureState<Real, 4>(tensor_product(a.amplitudes(), b.amplitudes()));
}

// ---------------------------------------------------------------------------
// Partial trace and Kraus conjugation

template <typename Real>
SquareMatrix<Real, 2> partial_trace(const SquareMatrix<Real, 4>& rho, Qubit keep) {
  SquareMatrix<Real, 2> out = SquareMatrix<Real, 2>::Zero();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 2; ++k)
        out(r, c) += keep == Qubit::A ? rho(2 * r + k, 2 * c + k) : rho(2 * k + r, 2 * k + c);
  return out;
}

template <typename Real>
DensityMatrix<Real, 2> partial_trace(const DensityMatrix<Real, 4>& rho, Qubit keep) {
  return DensityMatrix<Real, 2>(partial_trace<Real>(rho.matrix(), keep));
}

template <typename Real, int Dim>
struct ConjugatedBranch {
  SquareMatrix<Real, Dim> matrix;  // m rho m^dagger, unnormalized
  Real weight;                     // its trace
};

template <typename Real, int Dim>
ConjugatedBranch<Real, Dim> conjugate_map(const SquareMatrix<Real, Dim>& rho, const SquareMatrix<Real, Dim>& m) {
  ConjugatedBranch<Real, Dim> out{m * rho * m.adjoint(), Real(0)};
  out.weight = out.matrix.trace().real();
  return out;
}

template <typename Real, int Dim>
ConjugatedBranch<Real, Dim> conjugate_map(const DensityMatrix<Real, Dim>& rho, const SquareMatrix<Real, Dim>& m) {
  return conjugate_map<Real, Dim>(rho.matrix(), m);
}

/// Operator acting as `op` on the target qubit and identity on the other.
template <typename Real>
SquareMatrix<Real, 4> embed(const SquareMatrix<Real, 2>& op, Qubit target) {
  const SquareMatrix<Real, 2> id = SquareMatrix<Real, 2>::Identity();
  return target == Qubit::A ? tensor_product(op, id) : tensor_product(id, op);
}

}  // namespace seqmeas

#endif  // SEQMEAS_QCORE_HPP
