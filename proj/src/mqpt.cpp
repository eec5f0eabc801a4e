#include "cqpt/mqpt.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <ostream>

namespace cqpt {
namespace {

std::vector<Vector> pauli_eigenkets() {
  const double h = 1.0 / std::sqrt(2.0);
  const Scalar i(0.0, 1.0);
  std::vector<Vector> kets(6, Vector(2));
  kets[0] << 1.0, 0.0;
  kets[1] << 0.0, 1.0;
  kets[2] << h, h;
  kets[3] << h, -h;
  kets[4] << h, i * h;
  kets[5] << h, -i * h;
  return kets;
}

long long pow_ll(long long base, int exp) {
  long long r = 1;
  for (int e = 0; e < exp; ++e) r *= base;
  return r;
}

MqptResult run_with_ledger(const Objective& obj, StiefelPoint start,
                           const TrainerConfig& config, ResourceLedger ledger,
                           const long long* calls) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  MqptResult out{optimize(obj, std::move(start), config), {}};
  ledger.elapsed_ms =
      config.timing ? std::chrono::duration<double, std::milli>(Clock::now() - t0).count()
                    : std::numeric_limits<double>::quiet_NaN();
  ledger.cost_calls = *calls;
  ledger.total_evaluations = *calls * ledger.evaluations_per_call;
  for (const auto& r : out.trace.records) {
    ledger.rows.push_back({r.iteration, ledger.evaluations_per_call, r.elapsed_ms});
  }
  out.ledger = std::move(ledger);
  return out;
}

}  // namespace

PovmSet povm_set(int num_qubits) {
  qubit_dimension(num_qubits);
  const auto single = pauli_eigenkets();
  std::vector<Vector> kets{Vector::Ones(1)};
  for (int q = 0; q < num_qubits; ++q) {
    std::vector<Vector> next;
    next.reserve(kets.size() * single.size());
    for (const auto& a : kets) {
      for (const auto& b : single) next.push_back(kron(a, b));
    }
    kets = std::move(next);
  }
  return {num_qubits, std::move(kets)};
}

long long cqpt_stored_entries(int num_qubits, Index kraus_terms, Index probes) {
  return kraus_terms * pow_ll(4, num_qubits) + probes;
}

long long mqpt_stored_entries(int num_qubits, Index kraus_terms, Index probes, Index povm) {
  const long long d2 = pow_ll(4, num_qubits);
  return kraus_terms * d2 + povm * d2 + probes * povm;
}

MqptObjective::MqptObjective(const ChannelSpec& target, const TrainingDataset& data,
                             PovmSet povm)
    : dim_(target.dimension()), povm_(std::move(povm)) {
  if (data.dimension() != dim_ || (povm_.size() > 0 && povm_.kets.front().size() != dim_)) {
    throw std::invalid_argument("MqptObjective: dimension mismatch");
  }
  if (data.size() == 0 || povm_.size() == 0) {
    throw std::invalid_argument("MqptObjective: empty dataset or POVM");
  }
  const auto kraus = kraus_of(target);
  outcomes_.resize(data.size(), povm_.size());
  for (Index i = 0; i < data.size(); ++i) {
    states_.push_back(data.state(i));
    const Matrix out = apply_kraus(kraus, states_.back());
    for (Index j = 0; j < povm_.size(); ++j) {
      const Vector& m = povm_.kets[static_cast<std::size_t>(j)];
      outcomes_(i, j) = m.dot(out * m);
    }
  }
}

Matrix MqptObjective::residuals(const Matrix& k_stack) const {
  if (k_stack.cols() != dim_ || k_stack.rows() % dim_ != 0) {
    throw std::invalid_argument("MqptObjective: stack shape mismatch");
  }
  Matrix t(outcomes_.rows(), outcomes_.cols());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const Matrix model = apply_kraus_stack(k_stack, states_[i]);
    for (Index j = 0; j < povm_.size(); ++j) {
      const Vector& m = povm_.kets[static_cast<std::size_t>(j)];
      t(static_cast<Index>(i), j) = outcomes_(static_cast<Index>(i), j) - m.dot(model * m);
    }
  }
  return t;
}

MqptCost MqptObjective::cost(const Matrix& k_stack) const {
  const Matrix t = residuals(k_stack);
  return {t.real().squaredNorm(), evaluations_per_call()};
}

Matrix MqptObjective::gradient(const Matrix& k_stack) const {
  const Matrix t = residuals(k_stack);
  const Index d = dim_;
  const Index k = k_stack.rows() / d;
  Matrix g = Matrix::Zero(k_stack.rows(), d);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    Matrix weighted = Matrix::Zero(d, d);
    for (Index j = 0; j < povm_.size(); ++j) {
      const Vector& m = povm_.kets[static_cast<std::size_t>(j)];
      weighted.noalias() += t(static_cast<Index>(i), j).real() * (m * m.adjoint());
    }
    for (Index l = 0; l < k; ++l) {
      g.middleRows(l * d, d).noalias() -= 4.0 * weighted * k_stack.middleRows(l * d, d) *
                                          states_[i];
    }
  }
  return g;
}

MqptCost cost_mqpt(const Matrix& k_stack, const ChannelSpec& target,
                   const TrainingDataset& data, const PovmSet& povm) {
  return MqptObjective(target, data, povm).cost(k_stack);
}

MqptResult train_mqpt(const ChannelSpec& target, const TrainingDataset& data,
                      const TrainerConfig& config, RngStream& rng) {
  config.validate();
  const Index d = target.dimension();
  const Index k = config.kraus_terms > 0 ? config.kraus_terms : d;
  const MqptObjective objective(target, data, povm_set(target.num_qubits()));
  long long calls = 0;
  Objective obj;
  obj.cost = [&](const Matrix& m) {
    ++calls;
    return objective.cost(m).cost;
  };
  if (config.gradient_mode == GradientMode::analytic) {
    obj.gradient = [&](const Matrix& m) { return objective.gradient(m); };
  }
  ResourceLedger ledger;
  ledger.method = "mqpt";
  ledger.num_qubits = target.num_qubits();
  ledger.evaluations_per_call = objective.evaluations_per_call();
  ledger.stored_entries = mqpt_stored_entries(target.num_qubits(), k, data.size(),
                                              default_dataset_size(target.num_qubits()));
  return run_with_ledger(obj, StiefelPoint::random(k * d, d, rng), config, std::move(ledger),
                         &calls);
}

MqptResult train_cqpt_with_ledger(const ChannelSpec& target, const TrainingDataset& data,
                                  const TrainerConfig& config, RngStream& rng) {
  config.validate();
  const Index d = target.dimension();
  const Index k = config.kraus_terms > 0 ? config.kraus_terms : d;
  long long calls = 0;
  Objective obj;
  obj.cost = [&](const Matrix& m) {
    ++calls;
    return cost_kraus(m, target, data);
  };
  if (config.gradient_mode == GradientMode::analytic) {
    obj.gradient = [&](const Matrix& m) {
      return grad_kraus(StiefelPoint::from_matrix(m), target, data);
    };
  }
  ResourceLedger ledger;
  ledger.method = "cqpt";
  ledger.num_qubits = target.num_qubits();
  ledger.evaluations_per_call = data.size();
  ledger.stored_entries = cqpt_stored_entries(target.num_qubits(), k, data.size());
  return run_with_ledger(obj, StiefelPoint::random(k * d, d, rng), config, std::move(ledger),
                         &calls);
}

void write_ledger_csv(std::ostream& out, const std::vector<ResourceLedger>& ledgers) {
  out << "method,N,iteration,evaluations,stored_entries,elapsed_ms\n";
  for (const auto& l : ledgers) {
    for (const auto& r : l.rows) {
      out << l.method << ',' << l.num_qubits << ',' << r.iteration << ',' << r.evaluations
          << ',' << l.stored_entries << ',' << csv_number(r.elapsed_ms) << '\n';
    }
  }
}

}  // namespace cqpt
