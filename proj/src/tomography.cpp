#include "cqpt/tomography.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "cqpt/metrics.hpp"

namespace cqpt {
namespace {

const Matrix& require_unitary(const ChannelSpec& target, const char* who) {
  if (!target.is_unitary()) {
    throw std::invalid_argument(std::string(who) + ": target must be unitary, got " +
                                to_string(target.kind()));
  }
  return target.unitary_matrix();
}

void check_stack(const Matrix& k_stack, Index d, const char* who) {
  if (k_stack.cols() != d || k_stack.rows() % d != 0 || k_stack.rows() == 0) {
    throw std::invalid_argument(std::string(who) + ": stack " + std::to_string(k_stack.rows()) +
                                "x" + std::to_string(k_stack.cols()) +
                                " does not match dimension " + std::to_string(d));
  }
}

void check_data(const TrainingDataset& data, Index d, const char* who) {
  if (data.size() == 0) throw std::invalid_argument(std::string(who) + ": empty dataset");
  if (data.dimension() != d) {
    throw std::invalid_argument(std::string(who) + ": dataset dimension " +
                                std::to_string(data.dimension()) + " vs channel " +
                                std::to_string(d));
  }
}

// a(i, l) = phi_i^dagger K_l psi_i with phi_i = U psi_i, and p_i = sum_l |a_il|^2.
struct KrausAmplitudes {
  Matrix a;
  RealVector p;
  std::vector<Vector> phi;
};

KrausAmplitudes kraus_amplitudes(const Matrix& k_stack, const Matrix& u,
                                 const TrainingDataset& data) {
  const Index d = u.rows();
  const Index k = k_stack.rows() / d;
  const Index n = data.size();
  KrausAmplitudes out{Matrix(n, k), RealVector(n), {}};
  out.phi.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Vector& psi = data.kets[static_cast<std::size_t>(i)];
    out.phi.push_back(u * psi);
    const Vector kpsi = k_stack * psi;
    for (Index l = 0; l < k; ++l) {
      out.a(i, l) = out.phi.back().dot(kpsi.segment(l * d, d));
    }
    out.p(i) = out.a.row(i).squaredNorm();
  }
  return out;
}

Matrix kraus_gradient(const Matrix& k_stack, const Matrix& u, const TrainingDataset& data) {
  const Index d = u.rows();
  const Index k = k_stack.rows() / d;
  const Index n = data.size();
  const KrausAmplitudes amp = kraus_amplitudes(k_stack, u, data);
  Matrix g = Matrix::Zero(k_stack.rows(), d);
  for (Index i = 0; i < n; ++i) {
    const Vector& psi = data.kets[static_cast<std::size_t>(i)];
    const Matrix outer = amp.phi[static_cast<std::size_t>(i)] * psi.adjoint();
    for (Index l = 0; l < k; ++l) {
      g.middleRows(l * d, d) += (amp.p(i) * amp.a(i, l)) * outer;
    }
  }
  return g * (-4.0 / static_cast<double>(n));
}

Matrix psd_normalized(const Matrix& m, const char* who) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(m));
  if (eig.info() != Eigen::Success) throw NumericalError(std::string(who) + ": eig failed");
  const RealVector vals = eig.eigenvalues().cwiseMax(0.0);
  const double tr = vals.sum();
  if (!(tr > 1e-14)) throw NumericalError(std::string(who) + ": output has no positive part");
  return eig.eigenvectors() * (vals / tr).asDiagonal() * eig.eigenvectors().adjoint();
}

Matrix reconstruct_with(const ChoiMatrix& j, const Matrix& rho_in) {
  const Matrix out = hermitian_part(apply_choi(j, rho_in));
  const double tr = out.trace().real();
  if (!(std::abs(tr) > 1e-14)) {
    throw NumericalError("reconstruct_state: zero-trace output");
  }
  return out / tr;
}

Matrix recover_with(const Matrix& b, const Matrix& sigma) {
  const Index d = sigma.rows();
  return psd_normalized(devec(b * vec(sigma), d, d), "recover_input");
}

}  // namespace

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Index default_dataset_size(int num_qubits) {
  qubit_dimension(num_qubits);
  Index n = 1;
  for (int q = 0; q < num_qubits; ++q) n *= 6;
  return n;
}

TrainingDataset make_dataset(int num_qubits, Index count, RngStream& rng) {
  const Index d = qubit_dimension(num_qubits);
  if (count < 0) throw std::invalid_argument("make_dataset: negative count");
  if (count == 0) count = default_dataset_size(num_qubits);
  TrainingDataset data;
  data.num_qubits = num_qubits;
  data.unitaries.reserve(static_cast<std::size_t>(count));
  data.kets.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    data.unitaries.push_back(haar_unitary(d, rng));
    data.kets.push_back(data.unitaries.back().col(0));
  }
  return data;
}

DatasetSplit make_split(int num_qubits, Index train_count, Index test_count,
                        const RngStream& rng) {
  RngStream train_rng = rng.substream(1);
  RngStream test_rng = rng.substream(2);
  return {make_dataset(num_qubits, train_count, train_rng),
          make_dataset(num_qubits, test_count, test_rng)};
}

std::string to_string(GradientMode m) {
  return m == GradientMode::analytic ? "analytic" : "finite_difference";
}

GradientMode gradient_mode_from_string(const std::string& name) {
  if (name == "analytic") return GradientMode::analytic;
  if (name == "finite_difference" || name == "fd") return GradientMode::finite_difference;
  throw std::invalid_argument("unknown gradient mode '" + name + "'");
}

void TrainerConfig::validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 10.0)) {
    throw ConfigError("learning_rate", "must lie in (0, 10]");
  }
  if (max_iters < 1) throw ConfigError("max_iters", "must be >= 1");
  if (!(cost_tol >= 0.0)) throw ConfigError("cost_tol", "must be >= 0");
  if (kraus_terms < 0) throw ConfigError("kraus_terms", "must be >= 0 (0 = default)");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale", "must be >= 0");
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
  out << "iteration,cost,grad_norm,elapsed_ms\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << csv_number(r.cost) << ',' << csv_number(r.grad_norm)
        << ',' << csv_number(r.elapsed_ms) << '\n';
  }
}

Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& cost,
                                  const Matrix& at, double step) {
  Matrix g(at.rows(), at.cols());
  Matrix probe = at;
  const Scalar i_unit(0.0, 1.0);
  for (Index c = 0; c < at.cols(); ++c) {
    for (Index r = 0; r < at.rows(); ++r) {
      const Scalar orig = at(r, c);
      probe(r, c) = orig + step;
      const double re_plus = cost(probe);
      probe(r, c) = orig - step;
      const double re_minus = cost(probe);
      probe(r, c) = orig + i_unit * step;
      const double im_plus = cost(probe);
      probe(r, c) = orig - i_unit * step;
      const double im_minus = cost(probe);
      probe(r, c) = orig;
      g(r, c) = Scalar((re_plus - re_minus) / (2 * step), (im_plus - im_minus) / (2 * step));
    }
  }
  return g;
}

double cost_kraus(const Matrix& k_stack, const ChannelSpec& target,
                  const TrainingDataset& data) {
  const Matrix& u = require_unitary(target, "cost_kraus");
  check_stack(k_stack, u.rows(), "cost_kraus");
  check_data(data, u.rows(), "cost_kraus");
  const KrausAmplitudes amp = kraus_amplitudes(k_stack, u, data);
  const double c = 1.0 - amp.p.squaredNorm() / static_cast<double>(data.size());
  return std::clamp(c, 0.0, 1.0);
}

double cost_kraus(const StiefelPoint& k_stack, const ChannelSpec& target,
                  const TrainingDataset& data) {
  return cost_kraus(k_stack.matrix(), target, data);
}

Matrix grad_kraus(const StiefelPoint& k_stack, const ChannelSpec& target,
                  const TrainingDataset& data) {
  const Matrix& u = require_unitary(target, "grad_kraus");
  check_stack(k_stack.matrix(), u.rows(), "grad_kraus");
  check_data(data, u.rows(), "grad_kraus");
  return kraus_gradient(k_stack.matrix(), u, data);
}

Matrix kraus_round_trip(const Matrix& k_stack, const ChannelSpec& target, const Matrix& rho) {
  const Matrix& u = require_unitary(target, "kraus_round_trip");
  check_stack(k_stack, u.rows(), "kraus_round_trip");
  return u.adjoint() * apply_kraus_stack(k_stack, rho) * u;
}

TrainingTrace train_kraus(const ChannelSpec& target, const TrainingDataset& data,
                          const TrainerConfig& config, RngStream& rng) {
  config.validate();
  const Matrix u = require_unitary(target, "train_kraus");
  check_data(data, u.rows(), "train_kraus");
  const Index d = u.rows();
  const Index k = config.kraus_terms > 0 ? config.kraus_terms : d;
  Objective obj;
  obj.cost = [&](const Matrix& m) { return cost_kraus(m, target, data); };
  if (config.gradient_mode == GradientMode::analytic) {
    obj.gradient = [&](const Matrix& m) { return kraus_gradient(m, u, data); };
  }
  return optimize(obj, StiefelPoint::random(k * d, d, rng), config);
}

double cost_choi(const ChoiMatrix& j, const ChannelSpec& target, const TrainingDataset& data,
                 OverlapMode mode) {
  const Index d = j.dim_in();
  check_data(data, d, "cost_choi");
  if (target.dimension() != d) throw std::invalid_argument("cost_choi: dimension mismatch");
  const Matrix jp = choi_pseudoinverse(j);
  const Matrix b = transfer_from_choi(jp, d);
  double acc = 0.0;
  for (Index i = 0; i < data.size(); ++i) {
    const Matrix rho = data.state(i);
    const Matrix sigma = apply_channel(target, rho);
    // Tr[(sigma^T (x) rho) J+] = sum_ab sigma(a, b) Tr[rho J+_{(a),(b)}]
    Scalar z = 0.0;
    for (Index a = 0; a < d; ++a) {
      for (Index bb = 0; bb < d; ++bb) {
        z += sigma(a, bb) * (rho * jp.block(a * d, bb * d, d, d)).trace();
      }
    }
    double ov = std::abs(z);
    if (mode == OverlapMode::raw) {
      ov = std::min(ov, 1.0 + 1e-9);
    } else {
      const double denom = vec(rho).norm() * (b * vec(sigma)).norm();
      ov = denom > 0.0 ? ov / denom : 0.0;
    }
    acc += ov * ov;
  }
  return std::clamp(1.0 - acc / static_cast<double>(data.size()), 0.0, 1.0);
}

ChoiObjective::ChoiObjective(const ChannelSpec& target, const TrainingDataset& data)
    : dim_(target.dimension()) {
  check_data(data, dim_, "ChoiObjective");
  const auto kraus = kraus_of(target);
  for (Index i = 0; i < data.size(); ++i) {
    const Matrix rho = data.state(i);
    probes_.push_back(vec(rho));
    outputs_.push_back(vec(apply_kraus(kraus, rho)));
  }
}

double ChoiObjective::cost_from_pinv(const Matrix& b, OverlapMode mode) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    const Vector y = b * outputs_[i];
    double ov = std::abs(probes_[i].dot(y));
    if (mode == OverlapMode::raw) {
      ov = std::min(ov, 1.0 + 1e-9);
    } else {
      const double denom = probes_[i].norm() * y.norm();
      ov = denom > 0.0 ? ov / denom : 0.0;
    }
    acc += ov * ov;
  }
  return std::clamp(1.0 - acc / static_cast<double>(probes_.size()), 0.0, 1.0);
}

double ChoiObjective::cost(const Matrix& k_stack, OverlapMode mode) const {
  check_stack(k_stack, dim_, "ChoiObjective::cost");
  return cost_from_pinv(pinv(transfer_matrix_from_stack(k_stack, dim_)), mode);
}

Matrix ChoiObjective::gradient(const Matrix& k_stack) const {
  check_stack(k_stack, dim_, "ChoiObjective::gradient");
  const Index d = dim_;
  const Index d2 = d * d;
  const auto kraus = unstack_kraus(k_stack, d);
  const Matrix s = transfer_matrix(kraus);
  const Matrix b = pinv(s);
  const double n = static_cast<double>(probes_.size());

  // Gradient with respect to B = S^+.
  Matrix gb = Matrix::Zero(d2, d2);
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    const Vector& x = probes_[i];
    const Vector y = b * outputs_[i];
    const Scalar z = x.dot(y);
    const double xn = x.norm();
    const double r = y.norm();
    const double az = std::abs(z);
    if (r == 0.0 || xn == 0.0) continue;
    const double ov = az / (xn * r);
    Vector g = -(az / (xn * r * r * r)) * y;
    if (az > 0.0) g += (z / (az * r * xn)) * x;
    gb.noalias() += ov * g * outputs_[i].adjoint();
  }
  gb *= -2.0 / n;

  // Through the pseudoinverse differential
  // dB = -B dS B + B B^dagger dS^dagger (I - S B) + (I - B S) dS^dagger B^dagger B.
  const Matrix id = Matrix::Identity(d2, d2);
  const Matrix gs = -b.adjoint() * gb * b.adjoint() +
                    (id - s * b) * gb.adjoint() * b * b.adjoint() +
                    b.adjoint() * b * gb.adjoint() * (id - b * s);

  // Through S = sum_l conj(K_l) (x) K_l.
  Matrix grad(k_stack.rows(), d);
  for (std::size_t l = 0; l < kraus.size(); ++l) {
    const Matrix& k = kraus[l];
    Matrix h = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index jj = 0; jj < d; ++jj) {
        const auto block = gs.block(i * d, jj * d, d, d);
        h += k(i, jj) * block;
        h(i, jj) += (block.conjugate().cwiseProduct(k)).sum();
      }
    }
    grad.middleRows(static_cast<Index>(l) * d, d) = h;
  }
  return grad;
}

StiefelPoint identity_anchored_stack(Index dim, Index terms, double init_scale,
                                     RngStream& rng) {
  if (terms < 1) throw std::invalid_argument("identity_anchored_stack: terms must be >= 1");
  Matrix a = Matrix::Zero(terms * dim, dim);
  a.topRows(dim) = Matrix::Identity(dim, dim);
  a += init_scale * complex_gaussian(terms * dim, dim, rng);
  return StiefelPoint::orthonormalized(a);
}

TrainingTrace train_choi(const ChannelSpec& target, const TrainingDataset& data,
                         const TrainerConfig& config, RngStream& rng) {
  config.validate();
  const Index d = target.dimension();
  check_data(data, d, "train_choi");
  const Index k = config.kraus_terms > 0 ? config.kraus_terms : d * d;
  const ChoiObjective objective(target, data);
  Objective obj;
  obj.cost = [&](const Matrix& m) { return objective.cost(m, OverlapMode::normalized); };
  if (config.gradient_mode == GradientMode::analytic) {
    obj.gradient = [&](const Matrix& m) { return objective.gradient(m); };
  }
  TrainingTrace trace =
      optimize(obj, identity_anchored_stack(d, k, config.init_scale, rng), config);
  trace.choi = ChoiMatrix::from_kraus_stack(trace.stack, d);
  return trace;
}

Matrix reconstruct_state(const ChoiMatrix& j, const Matrix& rho_in) {
  return reconstruct_with(j, rho_in);
}

Matrix recover_input(const ChoiMatrix& j, const Matrix& sigma) {
  if (sigma.rows() != j.dim_in() || sigma.cols() != j.dim_in()) {
    throw std::invalid_argument("recover_input: dimension mismatch");
  }
  return recover_with(pinv(transfer_from_choi(j.matrix(), j.dim_in())), sigma);
}

ChoiEvaluation evaluate_choi(const ChoiMatrix& j, const ChannelSpec& target,
                             const TrainingDataset& test) {
  check_data(test, j.dim_in(), "evaluate_choi");
  const Matrix b = pinv(transfer_from_choi(j.matrix(), j.dim_in()));
  const auto kraus = kraus_of(target);
  ChoiEvaluation ev;
  for (Index i = 0; i < test.size(); ++i) {
    const Matrix rho = test.state(i);
    const Matrix sigma = apply_kraus(kraus, rho);
    ev.input_infidelity += infidelity(rho, recover_with(b, sigma));
    ev.output_infidelity += infidelity(sigma, reconstruct_with(j, rho));
  }
  ev.input_infidelity /= static_cast<double>(test.size());
  ev.output_infidelity /= static_cast<double>(test.size());
  return ev;
}

double evaluate_kraus(const Matrix& k_stack, const ChannelSpec& target,
                      const TrainingDataset& test) {
  check_data(test, target.dimension(), "evaluate_kraus");
  double acc = 0.0;
  for (Index i = 0; i < test.size(); ++i) {
    const Matrix rho = test.state(i);
    acc += infidelity(rho, hermitian_part(kraus_round_trip(k_stack, target, rho)));
  }
  return acc / static_cast<double>(test.size());
}

TrainingTrace optimize(const Objective& objective, StiefelPoint start,
                       const TrainerConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] {
    if (!config.timing) return std::numeric_limits<double>::quiet_NaN();
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  const double alpha0 = config.learning_rate;
  const double alpha_floor = alpha0 / 1024.0;
  double alpha = alpha0;

  TrainingTrace trace;
  trace.gradient_fallback = config.gradient_mode == GradientMode::analytic &&
                            !static_cast<bool>(objective.gradient);
  StiefelPoint x = std::move(start);
  double c = objective.cost(x.matrix());
  if (!std::isfinite(c)) throw NumericalError("optimize: non-finite initial cost");
  trace.initial_cost = c;

  // The row for iteration it holds the cost before its step, so a converged
  // run ends with a row carrying the final cost.
  for (int it = 0; it < config.max_iters; ++it) {
    const Matrix g = objective.gradient ? objective.gradient(x.matrix())
                                        : finite_difference_gradient(objective.cost, x.matrix());
    if (!g.allFinite()) throw NumericalError("optimize: non-finite gradient");
    const TangentVector riem = project_to_tangent(x, g);
    const double gnorm = riem.matrix().norm();
    trace.records.push_back({it, c, gnorm, elapsed()});
    if (c < config.cost_tol || gnorm == 0.0) break;

    bool accepted = false;
    while (alpha >= alpha_floor) {
      try {
        StiefelPoint y = retract(x, riem * -alpha, config.retraction);
        const double cy = objective.cost(y.matrix());
        if (cy <= c) {
          x = std::move(y);
          c = cy;
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
        // treated like an uphill step
      }
      alpha /= 2.0;
    }
    if (!accepted) {
      trace.stalled = true;
      break;
    }
    trace.iterations = it + 1;
    alpha = std::min(2.0 * alpha, alpha0);
  }

  trace.final_cost = c;
  trace.converged = c < config.cost_tol;
  trace.stack = x.matrix();
  return trace;
}

}  // namespace cqpt
