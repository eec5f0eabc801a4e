#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cqpt/tomography.hpp"

namespace cqpt {

/// Rank-1 POVM-style projectors |m_j><m_j|, kept as kets.
struct PovmSet {
  int num_qubits = 0;
  std::vector<Vector> kets;

  Index size() const noexcept { return static_cast<Index>(kets.size()); }
  Matrix element(Index j) const { return projector(kets[static_cast<std::size_t>(j)]); }
};

/// All N-fold tensor products of the six Pauli eigenstates
/// |0>, |1>, |+>, |->, |+i>, |-i>. 6^N elements, summing to 3^N I.
PovmSet povm_set(int num_qubits);

/// Exact measurement and memory counters.
struct ResourceLedger {
  std::string method;
  int num_qubits = 0;
  /// Trace evaluations performed by one cost call: n for CQPT, n * p for MQPT.
  long long evaluations_per_call = 0;
  long long cost_calls = 0;
  long long total_evaluations = 0;
  /// Complex scalars held: trainable stack plus reference data.
  long long stored_entries = 0;
  /// Whole training run; NaN unless timing is on.
  double elapsed_ms = 0.0;
  /// Per-iteration (iteration, evaluations, elapsed_ms) rows.
  struct Row {
    int iteration = 0;
    long long evaluations = 0;
    double elapsed_ms = 0.0;
  };
  std::vector<Row> rows;
};

/// k 4^N + n: the stack and one measured probability per probe.
long long cqpt_stored_entries(int num_qubits, Index kraus_terms, Index probes);
/// k 4^N + p 4^N + n p: the stack, the POVM and the outcome table.
long long mqpt_stored_entries(int num_qubits, Index kraus_terms, Index probes, Index povm);

struct MqptCost {
  double cost = 0.0;
  long long evaluations = 0;
};

/// sum_ij (Tr[M_j (E(rho_i) - E_K(rho_i))])^2, no normalization.
MqptCost cost_mqpt(const Matrix& k_stack, const ChannelSpec& target,
                   const TrainingDataset& data, const PovmSet& povm);

/// Outcome table Tr[M_j E(rho_i)] computed once, reused by every cost call.
class MqptObjective {
 public:
  MqptObjective(const ChannelSpec& target, const TrainingDataset& data, PovmSet povm);

  MqptCost cost(const Matrix& k_stack) const;
  /// -4 sum_i (sum_j t_ij M_j) K_l rho_i per Kraus block.
  Matrix gradient(const Matrix& k_stack) const;

  long long evaluations_per_call() const noexcept {
    return static_cast<long long>(states_.size()) * povm_.size();
  }

 private:
  Matrix residuals(const Matrix& k_stack) const;  // t_ij, n x p

  Index dim_;
  PovmSet povm_;
  std::vector<Matrix> states_;
  Matrix outcomes_;  // n x p
};

struct MqptResult {
  TrainingTrace trace;
  ResourceLedger ledger;
};

/// Same optimizer and initialization as train_kraus with cost_mqpt.
MqptResult train_mqpt(const ChannelSpec& target, const TrainingDataset& data,
                      const TrainerConfig& config, RngStream& rng);

/// train_kraus plus the matching CQPT ledger.
MqptResult train_cqpt_with_ledger(const ChannelSpec& target, const TrainingDataset& data,
                                  const TrainerConfig& config, RngStream& rng);

/// method,N,iteration,evaluations,stored_entries,elapsed_ms
void write_ledger_csv(std::ostream& out, const std::vector<ResourceLedger>& ledgers);

}  // namespace cqpt
