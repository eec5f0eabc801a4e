#include "cqpt/qla.hpp"

#include <cmath>

namespace cqpt {

Matrix complex_gaussian(Index rows, Index cols, RngStream& rng) {
  Matrix g(rows, cols);
  const double scale = 1.0 / std::sqrt(2.0);
  // Fill in row-major semantic order so draws do not depend on storage layout.
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Scalar(re * scale, im * scale);
    }
  }
  return g;
}

Matrix orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < m.cols(); ++j) {
    const Scalar d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) {
      q.col(j) *= d / mag;
    }
  }
  return q;
}

Matrix haar_unitary(Index dim, RngStream& rng) {
  if (dim < 1) {
    throw std::invalid_argument("haar_unitary: dimension must be >= 1");
  }
  return orthonormalize(complex_gaussian(dim, dim, rng));
}

bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <=
         tol;
}

bool is_density_matrix(const Matrix& m, double tol) {
  if (m.rows() == 0 || !m.allFinite() || !is_hermitian(m, tol)) return false;
  if (std::abs(m.trace() - Scalar(1.0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Vector basis_ket(Index dim, Index index) {
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

Matrix pauli_i() { return Matrix::Identity(2, 2); }

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, Scalar(0.0, -1.0), Scalar(0.0, 1.0), 0.0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Index qubit_dimension(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 6) {
    throw std::invalid_argument("qubit count " + std::to_string(num_qubits) +
                                " outside supported range [1, 6]");
  }
  return Index{1} << num_qubits;
}

}  // namespace cqpt
