#include "cqpt/metrics.hpp"

#include "cqpt/qla.hpp"

namespace cqpt {

double infidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols()) {
    throw std::invalid_argument("infidelity: states have different shapes");
  }
  const Matrix product = psd_sqrt(rho) * psd_sqrt(sigma);
  Eigen::JacobiSVD<Matrix> svd(product);
  if (svd.info() != Eigen::Success) throw NumericalError("infidelity: SVD did not converge");
  const double fidelity = svd.singularValues().sum();
  return std::clamp(1.0 - fidelity, 0.0, 1.0);
}

double expect_sigma_x_first(const Matrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw std::invalid_argument("expect_sigma_x_first: expected a two-qubit state, got " +
                                std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()));
  }
  const Matrix op = kron(pauli_x(), pauli_i());
  return (op * rho).trace().real();
}

}  // namespace cqpt
