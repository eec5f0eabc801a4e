#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqpt/channels.hpp"
#include "cqpt/manifold.hpp"

namespace cqpt {

/// Input preparations W_i; the probe states are W_i |0>.
struct TrainingDataset {
  int num_qubits = 0;
  std::vector<Matrix> unitaries;
  std::vector<Vector> kets;  // W_i e_0

  Index size() const noexcept { return static_cast<Index>(unitaries.size()); }
  Index dimension() const noexcept { return Index{1} << num_qubits; }
  Matrix state(Index i) const { return projector(kets[static_cast<std::size_t>(i)]); }
};

/// 6^N
Index default_dataset_size(int num_qubits);

/// count Haar unitaries drawn from rng. count = 0 means default_dataset_size.
TrainingDataset make_dataset(int num_qubits, Index count, RngStream& rng);

struct DatasetSplit {
  TrainingDataset train;
  TrainingDataset test;
};

/// Training and testing sets from the disjoint substreams 1 and 2 of rng.
DatasetSplit make_split(int num_qubits, Index train_count, Index test_count,
                        const RngStream& rng);

enum class GradientMode { analytic, finite_difference };

std::string to_string(GradientMode m);
GradientMode gradient_mode_from_string(const std::string& name);

struct TrainerConfig {
  double learning_rate = 0.5;
  int max_iters = 2000;
  double cost_tol = 1e-6;
  Retraction retraction = Retraction::cayley;
  /// 0 selects the path default: 2^N for Kraus, 4^N for Choi.
  Index kraus_terms = 0;
  GradientMode gradient_mode = GradientMode::analytic;
  /// Choi path only: spread of the random perturbation around the identity
  /// channel used as the starting point.
  double init_scale = 0.05;
  /// Record wall-clock per iteration. Off by default so traces are
  /// reproducible bit for bit.
  bool timing = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double elapsed_ms = 0.0;  // NaN unless timing is on
};

struct TrainingTrace {
  std::vector<IterationRecord> records;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Backtracking hit its floor without finding a non-increasing step.
  bool stalled = false;
  /// An analytic gradient was requested but unavailable.
  bool gradient_fallback = false;
  Matrix stack;
  std::optional<ChoiMatrix> choi;
};

/// %.17g, or "nan". Every CSV writer goes through this.
std::string csv_number(double v);

/// iteration,cost,grad_norm,elapsed_ms with 17 significant digits.
void write_trace_csv(std::ostream& out, const TrainingTrace& trace);

/// Central finite-difference gradient, real and imaginary parts perturbed
/// separately, in the convention dC = Re Tr(G^dagger dK).
Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& cost,
                                  const Matrix& at, double step = 1e-5);

// Kraus path ----------------------------------------------------------------

/// 1 - (1/n) sum_i p_i^2 with p_i = <0|W_i^dagger U^dagger E_K(rho_i) U W_i|0>.
double cost_kraus(const StiefelPoint& k_stack, const ChannelSpec& target,
                  const TrainingDataset& data);
double cost_kraus(const Matrix& k_stack, const ChannelSpec& target, const TrainingDataset& data);

/// Euclidean gradient -(4/n) sum_i p_i a_il U psi_i psi_i^dagger per Kraus
/// block, where a_il = psi_i^dagger U^dagger K_l psi_i.
Matrix grad_kraus(const StiefelPoint& k_stack, const ChannelSpec& target,
                  const TrainingDataset& data);

/// U^dagger E_K(rho) U
Matrix kraus_round_trip(const Matrix& k_stack, const ChannelSpec& target, const Matrix& rho);

TrainingTrace train_kraus(const ChannelSpec& target, const TrainingDataset& data,
                          const TrainerConfig& config, RngStream& rng);

// Choi path -----------------------------------------------------------------

enum class OverlapMode {
  /// z_i = Tr[(E(rho_i)^T (x) rho_i) J^+], |z_i| clamped at 1 + 1e-9.
  raw,
  /// |z_i| / ||S^+ vec E(rho_i)||, bounded by 1 for pure probes.
  normalized,
};

/// 1 - (1/n) sum_i |z_i|^2 with J^+ = choi_pseudoinverse(j), i.e. the Choi
/// matrix of the pseudoinverse of the process. Clamped to [0, 1].
double cost_choi(const ChoiMatrix& j, const ChannelSpec& target, const TrainingDataset& data,
                 OverlapMode mode = OverlapMode::raw);

/// Target outputs for a dataset, precomputed once per training run.
/// Probes and outputs are stored column-stacked.
class ChoiObjective {
 public:
  ChoiObjective(const ChannelSpec& target, const TrainingDataset& data);

  Index dimension() const noexcept { return dim_; }

  /// Cost of the channel whose Kraus stack is given.
  double cost(const Matrix& k_stack, OverlapMode mode = OverlapMode::normalized) const;

  /// Analytic Euclidean gradient of the normalized cost with respect to the
  /// stack, through d(S^+) and S = sum_l conj(K_l) (x) K_l.
  Matrix gradient(const Matrix& k_stack) const;

 private:
  double cost_from_pinv(const Matrix& b, OverlapMode mode) const;

  Index dim_;
  std::vector<Vector> probes_;   // vec(rho_i)
  std::vector<Vector> outputs_;  // vec(E(rho_i))
};

/// Identity channel plus init_scale * Gaussian noise, orthonormalized.
StiefelPoint identity_anchored_stack(Index dim, Index terms, double init_scale, RngStream& rng);

TrainingTrace train_choi(const ChannelSpec& target, const TrainingDataset& data,
                         const TrainerConfig& config, RngStream& rng);

/// Tr_X[(rho^T (x) I) J], renormalized to unit trace.
Matrix reconstruct_state(const ChoiMatrix& j, const Matrix& rho_in);

/// Estimate of the input that produced sigma: S^+ vec(sigma) reshaped, made
/// Hermitian, clipped to its PSD part and renormalized.
Matrix recover_input(const ChoiMatrix& j, const Matrix& sigma);

struct ChoiEvaluation {
  double input_infidelity = 0.0;   // mean I_F(rho_in, rho_f)
  double output_infidelity = 0.0;  // mean I_F(rho_E, rho_J)
};

ChoiEvaluation evaluate_choi(const ChoiMatrix& j, const ChannelSpec& target,
                             const TrainingDataset& test);

/// mean I_F(rho_in, U^dagger E_K(rho_in) U)
double evaluate_kraus(const Matrix& k_stack, const ChannelSpec& target,
                      const TrainingDataset& test);

// Shared optimizer ------------------------------------------------------------

struct Objective {
  std::function<double(const Matrix&)> cost;
  /// Empty means finite differences.
  std::function<Matrix(const Matrix&)> gradient;
};

/// Riemannian descent with backtracking: alpha is halved until the cost does
/// not increase, down to learning_rate / 1024, and doubled back (up to
/// learning_rate) after each accepted step.
TrainingTrace optimize(const Objective& objective, StiefelPoint start,
                       const TrainerConfig& config);

}  // namespace cqpt
