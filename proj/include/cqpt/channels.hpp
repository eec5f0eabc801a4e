#pragma once

#include <string>
#include <vector>

#include "cqpt/qla.hpp"
#include "cqpt/types.hpp"

namespace cqpt {

enum class ChannelKind {
  unitary,
  dephasing,
  /// (1 - p) rho + p I / 2^N, the global form.
  depolarizing,
  /// Tensor product of single-qubit depolarizing channels.
  depolarizing_local,
  amplitude_damping,
  /// Tensor product of the listed channels, first part on the most
  /// significant qubits.
  tensor_composite,
};

std::string to_string(ChannelKind kind);
ChannelKind channel_kind_from_string(const std::string& name);

/// Declarative CPTP map. Values are immutable once built; factories validate
/// parameter ranges and unitarity.
class ChannelSpec {
 public:
  static ChannelSpec unitary(Matrix u);
  static ChannelSpec identity(int num_qubits);
  static ChannelSpec dephasing(int num_qubits, double gamma);
  static ChannelSpec dephasing(std::vector<double> gamma_per_qubit);
  static ChannelSpec depolarizing(int num_qubits, double p);
  static ChannelSpec depolarizing_local(int num_qubits, double p);
  static ChannelSpec amplitude_damping(int num_qubits, double gamma);
  static ChannelSpec amplitude_damping(std::vector<double> gamma_per_qubit);
  static ChannelSpec tensor(std::vector<ChannelSpec> parts);

  ChannelKind kind() const noexcept { return kind_; }
  int num_qubits() const noexcept { return num_qubits_; }
  Index dimension() const noexcept { return Index{1} << num_qubits_; }
  bool is_unitary() const noexcept { return kind_ == ChannelKind::unitary; }

  /// Per-qubit gamma for dephasing/damping, a single p for depolarizing.
  const std::vector<double>& parameters() const noexcept { return params_; }
  const Matrix& unitary_matrix() const;
  const std::vector<ChannelSpec>& parts() const noexcept { return parts_; }

 private:
  ChannelSpec() = default;

  ChannelKind kind_ = ChannelKind::unitary;
  int num_qubits_ = 0;
  std::vector<double> params_;
  Matrix unitary_;
  std::vector<ChannelSpec> parts_;
};

/// Kraus operators realizing spec. Terms with an exactly zero coefficient
/// are dropped, so gamma = 0 dephasing yields the single operator I.
std::vector<Matrix> kraus_of(const ChannelSpec& spec);

/// Vertically stacked (k d) x d form of a Kraus list, and its inverse.
Matrix stack_kraus(const std::vector<Matrix>& kraus);
std::vector<Matrix> unstack_kraus(const Matrix& stack, Index dim);

/// sum_l K_l rho K_l^dagger
Matrix apply_kraus(const std::vector<Matrix>& kraus, const Matrix& rho);
Matrix apply_kraus_stack(const Matrix& stack, const Matrix& rho);

/// Maximum deviation of sum_l K_l^dagger K_l from the identity.
double completeness_error(const std::vector<Matrix>& kraus);

DensityMatrix apply_channel(const ChannelSpec& spec, const DensityMatrix& rho);

/// U^dagger rho U. Refuses non-unitary specs: their inverse is not CPTP.
DensityMatrix apply_inverse_unitary(const ChannelSpec& spec, const DensityMatrix& rho);

/// Linear-order inverse U^dagger rho U / (1 - epsilon) of the weakly noisy map
/// (1 - epsilon) U rho U^dagger + epsilon I / d. The neglected term is
/// epsilon / (1 - epsilon) * I / d, i.e. first order in epsilon.
Matrix apply_effective_inverse(const ChannelSpec& spec, double epsilon, const Matrix& rho);

/// Choi matrix J = sum_ij |i><j| (x) E(|i><j|) on H_X (x) H_Y, input copy X first.
class ChoiMatrix {
 public:
  static constexpr double kTolerance = 1e-9;

  /// Validates Hermitian PSD and Tr_Y J = I to kTolerance.
  static ChoiMatrix from_matrix(Matrix j, Index dim_in);
  static ChoiMatrix from_kraus(const std::vector<Matrix>& kraus);
  static ChoiMatrix from_kraus_stack(const Matrix& stack, Index dim_in);

  Index dim_in() const noexcept { return dim_in_; }
  const Matrix& matrix() const noexcept { return j_; }

  /// Largest violation of the Choi invariants (Hermiticity, PSD, Tr_Y J = I).
  static double invariant_error(const Matrix& j, Index dim_in);

 private:
  ChoiMatrix(Matrix j, Index dim_in) : j_(std::move(j)), dim_in_(dim_in) {}

  Matrix j_;
  Index dim_in_;
};

ChoiMatrix choi_of(const ChannelSpec& spec);

/// E(rho) = Tr_X[(rho^T (x) I) J], contracted directly in O(d^4).
Matrix apply_choi(const ChoiMatrix& j, const Matrix& rho);

/// Column-stacking transfer matrix S with vec(E(rho)) = S vec(rho).
Matrix transfer_matrix(const std::vector<Matrix>& kraus);
Matrix transfer_matrix_from_stack(const Matrix& stack, Index dim);

/// Realignment between the Choi matrix and the transfer matrix:
/// J[(i,a),(j,b)] = S[(b,a),(j,i)] in column-stacking indices.
Matrix transfer_from_choi(const Matrix& j, Index dim_in);
Matrix choi_from_transfer(const Matrix& s, Index dim_in);

/// Choi matrix of the Moore-Penrose pseudoinverse of the map encoded by j,
/// i.e. choi_from_transfer(pinv(transfer_from_choi(j))). For an invertible
/// channel this is the Choi matrix of its (generally non-CP) inverse.
Matrix choi_pseudoinverse(const ChoiMatrix& j);

enum class ScheduleKind { homogeneous, inhomogeneous };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// Time-dependent dephasing strength.
struct NoiseSchedule {
  ScheduleKind kind = ScheduleKind::homogeneous;
  double beta = 0.0;
};

/// homogeneous: 1 - exp(-2 beta t); inhomogeneous: 1 - exp(-beta t^2).
double gamma_at(const NoiseSchedule& schedule, double t);

/// Flat key=value text form (kind, qubits, gamma, p, beta, t, schedule, u).
/// Numbers are written with 17 significant digits so parsing round-trips.
std::string to_config_text(const ChannelSpec& spec);

/// Parses the text form. gamma may be omitted for dephasing when beta and t
/// are given, in which case it is derived through gamma_at. Throws ConfigError.
ChannelSpec parse_channel_spec(const std::string& text);

}  // namespace cqpt
