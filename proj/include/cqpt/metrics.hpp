#pragma once

#include "cqpt/types.hpp"

namespace cqpt {

/// 1 - Tr sqrt(sqrt(rho) sigma sqrt(rho)), the square-root-fidelity form,
/// clamped to [0, 1]. The trace is evaluated as the nuclear norm of
/// sqrt(rho) sqrt(sigma), which avoids taking square roots of roundoff-level
/// eigenvalues (those alone put a ~1e-8 floor under near-identical states).
/// Throws NumericalError for inputs with eigenvalues below -kPsdTolerance.
double infidelity(const Matrix& rho, const Matrix& sigma);

/// Tr[(sigma_x (x) I) rho] for a two-qubit state.
double expect_sigma_x_first(const Matrix& rho);

}  // namespace cqpt
