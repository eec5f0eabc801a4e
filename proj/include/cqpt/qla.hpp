#pragma once

// Dense complex linear-algebra kernel shared by every other module.
//
// Conventions fixed here and relied on everywhere else:
//  * Kronecker products put the first operand on the most significant index,
//    so a bipartite index is (x, y) -> x * dY + y.
//  * vec() stacks columns, which makes vec(A B C) = (C^T (x) A) vec(B) exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cqpt/rng.hpp"
#include "cqpt/types.hpp"

namespace cqpt {

/// Largest row or column count any kernel will materialize. N = 5 qubits puts
/// Choi matrices at 1024 x 1024; anything beyond 4096 is treated as infeasible.
inline constexpr Index kMaxDimension = 4096;

template <typename Derived>
using PlainMatrixOf =
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename DerivedA, typename DerivedB>
PlainMatrixOf<DerivedA> kron(const Eigen::MatrixBase<DerivedA>& a,
                             const Eigen::MatrixBase<DerivedB>& b) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw std::length_error("kron: result " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " exceeds maximum dimension");
  }
  PlainMatrixOf<DerivedA> out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

enum class Subsystem { X, Y };

/// Partial trace of an operator on H_X (x) H_Y with X-first ordering.
/// Tracing out X leaves a dY x dY operator; tracing out Y leaves dX x dX.
template <typename Derived>
PlainMatrixOf<Derived> partial_trace(const Eigen::MatrixBase<Derived>& m,
                                     Index dim_x, Index dim_y, Subsystem traced) {
  if (m.rows() != dim_x * dim_y || m.cols() != dim_x * dim_y) {
    throw std::invalid_argument("partial_trace: operator is " +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " +
                                std::to_string(dim_x * dim_y) + " square");
  }
  if (traced == Subsystem::X) {
    PlainMatrixOf<Derived> out = PlainMatrixOf<Derived>::Zero(dim_y, dim_y);
    for (Index x = 0; x < dim_x; ++x) {
      out += m.block(x * dim_y, x * dim_y, dim_y, dim_y);
    }
    return out;
  }
  PlainMatrixOf<Derived> out(dim_x, dim_x);
  for (Index x = 0; x < dim_x; ++x) {
    for (Index xp = 0; xp < dim_x; ++xp) {
      out(x, xp) = m.block(x * dim_y, xp * dim_y, dim_y, dim_y).trace();
    }
  }
  return out;
}

/// Column-stacking vectorization.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vec(
    const Eigen::MatrixBase<Derived>& m) {
  const PlainMatrixOf<Derived> plain = m;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(
      plain.data(), plain.size());
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> devec(
    const Eigen::MatrixBase<Derived>& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("devec: vector of length " + std::to_string(v.size()) +
                                " cannot be reshaped to " + std::to_string(rows) +
                                "x" + std::to_string(cols));
  }
  const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> plain = v;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic,
                                        Eigen::Dynamic>>(plain.data(), rows, cols);
}

template <typename Derived>
PlainMatrixOf<Derived> hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / typename Derived::RealScalar(2);
}

inline constexpr double kPsdTolerance = 1e-8;

/// Hermitian PSD square root. Eigenvalues in [-kPsdTolerance, 0) are treated
/// as roundoff and clipped; anything more negative is rejected.
template <typename Derived>
PlainMatrixOf<Derived> psd_sqrt(const Eigen::MatrixBase<Derived>& m,
                                 double tolerance = kPsdTolerance) {
  using Plain = PlainMatrixOf<Derived>;
  const Plain h = hermitian_part(m);
  Eigen::SelfAdjointEigenSolver<Plain> eig(h);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("psd_sqrt: eigendecomposition failed");
  }
  auto values = eig.eigenvalues();
  if (values.size() > 0 && values.minCoeff() < -tolerance) {
    throw NumericalError("psd_sqrt: eigenvalue " + std::to_string(values.minCoeff()) +
                         " below tolerance");
  }
  const auto roots = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Moore-Penrose pseudoinverse by SVD. Singular values at or below
/// max(rows, cols) * sigma_max * 64 * 2.2e-16 are treated as zero.
template <typename Derived>
PlainMatrixOf<Derived> pinv(const Eigen::MatrixBase<Derived>& m) {
  using Plain = PlainMatrixOf<Derived>;
  if (!m.allFinite()) {
    throw std::invalid_argument("pinv: non-finite entries");
  }
  Eigen::BDCSVD<Plain> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("pinv: SVD did not converge");
  }
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0) {
    return Plain::Zero(m.cols(), m.rows());
  }
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        sigma(0) * 2.2e-16 * 64.0;
  Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> inverted(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i) {
    inverted(i) = sigma(i) > cutoff ? 1.0 / sigma(i) : 0.0;
  }
  return svd.matrixV() * inverted.asDiagonal() * svd.matrixU().adjoint();
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of R's diagonal folded back into Q.
Matrix haar_unitary(Index dim, RngStream& rng);

/// Complex matrix with i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
Matrix complex_gaussian(Index rows, Index cols, RngStream& rng);

/// Thin QR orthonormalization with R's diagonal made real and positive.
Matrix orthonormalize(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol);
bool is_unitary(const Matrix& m, double tol);

/// Hermitian to tol, eigenvalues >= -tol, unit trace to tol.
bool is_density_matrix(const Matrix& m, double tol = 1e-10);

/// Spectral norm (largest singular value).
double spectral_norm(const Matrix& m);

/// Pure-state projector |psi><psi|.
inline Matrix projector(const Vector& psi) { return psi * psi.adjoint(); }

/// Computational basis ket |index> in dimension dim.
Vector basis_ket(Index dim, Index index);

/// Single-qubit Pauli matrices.
Matrix pauli_i();
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// 2^num_qubits, with a range check.
Index qubit_dimension(int num_qubits);

}  // namespace cqpt
