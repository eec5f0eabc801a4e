#include "cqpt/channels.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace cqpt {
namespace {

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(v) +
                                " outside [0, 1]");
  }
}

// Every tensor product of one element from each list, first list most significant.
std::vector<Matrix> tensor_lists(const std::vector<std::vector<Matrix>>& lists) {
  std::vector<Matrix> out{Matrix::Identity(1, 1)};
  for (const auto& list : lists) {
    std::vector<Matrix> next;
    next.reserve(out.size() * list.size());
    for (const auto& a : out) {
      for (const auto& b : list) next.push_back(kron(a, b));
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Matrix> prune_zero(std::vector<Matrix> kraus) {
  std::erase_if(kraus, [](const Matrix& k) { return (k.array() == Scalar(0.0)).all(); });
  if (kraus.empty()) {
    throw NumericalError("kraus_of: every Kraus term vanished");
  }
  return kraus;
}

std::vector<Matrix> dephasing_qubit(double gamma) {
  const double root = std::sqrt(1.0 - gamma);
  const double a = (1.0 + root) / 2.0;
  const double b = (1.0 - root) / 2.0;
  return {std::sqrt(a) * pauli_i(), std::sqrt(b) * pauli_z()};
}

std::vector<Matrix> damping_qubit(double gamma) {
  Matrix k0 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  Matrix k1 = Matrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return {k0, k1};
}

std::vector<Matrix> depolarizing_qubit(double p) {
  const double c = std::sqrt(p / 4.0);
  return {std::sqrt(1.0 - 3.0 * p / 4.0) * pauli_i(), c * pauli_x(), c * pauli_y(),
          c * pauli_z()};
}

std::vector<Matrix> depolarizing_global(int num_qubits, double p) {
  const std::vector<Matrix> paulis{pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  const auto strings = tensor_lists(std::vector<std::vector<Matrix>>(num_qubits, paulis));
  const double d2 = static_cast<double>(strings.size());
  std::vector<Matrix> out;
  out.reserve(strings.size());
  // strings[0] is the all-identity string.
  out.push_back(std::sqrt(1.0 - p + p / d2) * strings[0]);
  for (std::size_t i = 1; i < strings.size(); ++i) {
    out.push_back(std::sqrt(p / d2) * strings[i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first != last && *first == ' ') ++first;
  while (last != first && *(last - 1) == ' ') --last;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError(field, "not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(field, item));
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

using KeyValues = std::map<std::string, std::string>;

std::string require(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError(key, "missing");
  return it->second;
}

int parse_qubits(const KeyValues& kv) {
  const double q = parse_double("qubits", require(kv, "qubits"));
  if (q != std::floor(q) || q < 1 || q > 6) {
    throw ConfigError("qubits", "must be an integer in [1, 6]");
  }
  return static_cast<int>(q);
}

std::vector<double> per_qubit(const std::string& field, std::vector<double> v, int qubits) {
  if (v.size() == 1) return std::vector<double>(qubits, v[0]);
  if (static_cast<int>(v.size()) != qubits) {
    throw ConfigError(field, "expected 1 or " + std::to_string(qubits) + " values");
  }
  return v;
}

ChannelSpec spec_from_keys(const KeyValues& kv);

ChannelSpec spec_from_keys_checked(const KeyValues& kv) {
  try {
    return spec_from_keys(kv);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("channel", e.what());
  }
}

ChannelSpec spec_from_keys(const KeyValues& kv) {
  const std::string kind_name = require(kv, "kind");
  ChannelKind kind;
  try {
    kind = channel_kind_from_string(kind_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kind", e.what());
  }
  switch (kind) {
    case ChannelKind::unitary: {
      const int qubits = parse_qubits(kv);
      const Index d = Index{1} << qubits;
      const auto entries = parse_list("u", require(kv, "u"));
      if (static_cast<Index>(entries.size()) != 2 * d * d) {
        throw ConfigError("u", "expected " + std::to_string(2 * d * d) +
                                   " numbers (row-major re,im pairs)");
      }
      Matrix u(d, d);
      for (Index r = 0; r < d; ++r) {
        for (Index c = 0; c < d; ++c) {
          const std::size_t at = 2 * static_cast<std::size_t>(r * d + c);
          u(r, c) = Scalar(entries[at], entries[at + 1]);
        }
      }
      return ChannelSpec::unitary(std::move(u));
    }
    case ChannelKind::dephasing: {
      const int qubits = parse_qubits(kv);
      if (kv.contains("gamma")) {
        return ChannelSpec::dephasing(
            per_qubit("gamma", parse_list("gamma", kv.at("gamma")), qubits));
      }
      NoiseSchedule schedule;
      if (kv.contains("schedule")) {
        try {
          schedule.kind = schedule_kind_from_string(kv.at("schedule"));
        } catch (const std::invalid_argument& e) {
          throw ConfigError("schedule", e.what());
        }
      }
      schedule.beta = parse_double("beta", require(kv, "beta"));
      if (schedule.beta < 0) throw ConfigError("beta", "must be >= 0");
      const double t = parse_double("t", require(kv, "t"));
      if (t < 0) throw ConfigError("t", "must be >= 0");
      return ChannelSpec::dephasing(qubits, gamma_at(schedule, t));
    }
    case ChannelKind::depolarizing:
      return ChannelSpec::depolarizing(parse_qubits(kv), parse_double("p", require(kv, "p")));
    case ChannelKind::depolarizing_local:
      return ChannelSpec::depolarizing_local(parse_qubits(kv),
                                             parse_double("p", require(kv, "p")));
    case ChannelKind::amplitude_damping: {
      const int qubits = parse_qubits(kv);
      return ChannelSpec::amplitude_damping(
          per_qubit("gamma", parse_list("gamma", require(kv, "gamma")), qubits));
    }
    case ChannelKind::tensor_composite: {
      std::vector<ChannelSpec> parts;
      for (int i = 0;; ++i) {
        const std::string prefix = "part" + std::to_string(i) + ".";
        KeyValues sub;
        for (const auto& [k, v] : kv) {
          if (k.starts_with(prefix)) sub[k.substr(prefix.size())] = v;
        }
        if (sub.empty()) break;
        parts.push_back(spec_from_keys(sub));
      }
      if (parts.empty()) throw ConfigError("part0", "composite channel has no parts");
      return ChannelSpec::tensor(std::move(parts));
    }
  }
  throw ConfigError("kind", "unhandled");
}

void write_keys(const ChannelSpec& spec, const std::string& prefix, std::string& out) {
  auto line = [&](const std::string& k, const std::string& v) {
    out += prefix + k + "=" + v + "\n";
  };
  line("kind", to_string(spec.kind()));
  if (spec.kind() != ChannelKind::tensor_composite) {
    line("qubits", std::to_string(spec.num_qubits()));
  }
  switch (spec.kind()) {
    case ChannelKind::unitary: {
      const Matrix& u = spec.unitary_matrix();
      std::vector<double> entries;
      for (Index r = 0; r < u.rows(); ++r) {
        for (Index c = 0; c < u.cols(); ++c) {
          entries.push_back(u(r, c).real());
          entries.push_back(u(r, c).imag());
        }
      }
      line("u", join(entries));
      break;
    }
    case ChannelKind::dephasing:
    case ChannelKind::amplitude_damping:
      line("gamma", join(spec.parameters()));
      break;
    case ChannelKind::depolarizing:
    case ChannelKind::depolarizing_local:
      line("p", format_double(spec.parameters()[0]));
      break;
    case ChannelKind::tensor_composite:
      for (std::size_t i = 0; i < spec.parts().size(); ++i) {
        write_keys(spec.parts()[i], prefix + "part" + std::to_string(i) + ".", out);
      }
      break;
  }
}

}  // namespace

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::unitary: return "unitary";
    case ChannelKind::dephasing: return "dephasing";
    case ChannelKind::depolarizing: return "depolarizing";
    case ChannelKind::depolarizing_local: return "depolarizing_local";
    case ChannelKind::amplitude_damping: return "amplitude_damping";
    case ChannelKind::tensor_composite: return "tensor_composite";
  }
  return "?";
}

ChannelKind channel_kind_from_string(const std::string& name) {
  for (auto k : {ChannelKind::unitary, ChannelKind::dephasing, ChannelKind::depolarizing,
                 ChannelKind::depolarizing_local, ChannelKind::amplitude_damping,
                 ChannelKind::tensor_composite}) {
    if (to_string(k) == name) return k;
  }
  if (name == "damping") return ChannelKind::amplitude_damping;
  throw std::invalid_argument("unknown channel kind '" + name + "'");
}

ChannelSpec ChannelSpec::unitary(Matrix u) {
  if (u.rows() != u.cols() || u.rows() < 2 || (u.rows() & (u.rows() - 1)) != 0) {
    throw std::invalid_argument("unitary: matrix must be 2^N x 2^N");
  }
  if (!cqpt::is_unitary(u, 1e-10)) {
    throw std::invalid_argument("unitary: U^dagger U deviates from I by more than 1e-10");
  }
  ChannelSpec s;
  s.kind_ = ChannelKind::unitary;
  s.num_qubits_ = 0;
  for (Index d = u.rows(); d > 1; d >>= 1) ++s.num_qubits_;
  qubit_dimension(s.num_qubits_);
  s.unitary_ = std::move(u);
  return s;
}

ChannelSpec ChannelSpec::identity(int num_qubits) {
  return unitary(Matrix::Identity(qubit_dimension(num_qubits), qubit_dimension(num_qubits)));
}

ChannelSpec ChannelSpec::dephasing(int num_qubits, double gamma) {
  qubit_dimension(num_qubits);
  return dephasing(std::vector<double>(num_qubits, gamma));
}

ChannelSpec ChannelSpec::dephasing(std::vector<double> gamma_per_qubit) {
  qubit_dimension(static_cast<int>(gamma_per_qubit.size()));
  for (double g : gamma_per_qubit) check_unit_interval(g, "gamma");
  ChannelSpec s;
  s.kind_ = ChannelKind::dephasing;
  s.num_qubits_ = static_cast<int>(gamma_per_qubit.size());
  s.params_ = std::move(gamma_per_qubit);
  return s;
}

ChannelSpec ChannelSpec::depolarizing(int num_qubits, double p) {
  qubit_dimension(num_qubits);
  check_unit_interval(p, "p");
  ChannelSpec s;
  s.kind_ = ChannelKind::depolarizing;
  s.num_qubits_ = num_qubits;
  s.params_ = {p};
  return s;
}

ChannelSpec ChannelSpec::depolarizing_local(int num_qubits, double p) {
  ChannelSpec s = depolarizing(num_qubits, p);
  s.kind_ = ChannelKind::depolarizing_local;
  return s;
}

ChannelSpec ChannelSpec::amplitude_damping(int num_qubits, double gamma) {
  qubit_dimension(num_qubits);
  return amplitude_damping(std::vector<double>(num_qubits, gamma));
}

ChannelSpec ChannelSpec::amplitude_damping(std::vector<double> gamma_per_qubit) {
  ChannelSpec s = dephasing(std::move(gamma_per_qubit));
  s.kind_ = ChannelKind::amplitude_damping;
  return s;
}

ChannelSpec ChannelSpec::tensor(std::vector<ChannelSpec> parts) {
  if (parts.empty()) throw std::invalid_argument("tensor: no parts");
  ChannelSpec s;
  s.kind_ = ChannelKind::tensor_composite;
  for (const auto& p : parts) s.num_qubits_ += p.num_qubits();
  qubit_dimension(s.num_qubits_);
  s.parts_ = std::move(parts);
  return s;
}

const Matrix& ChannelSpec::unitary_matrix() const {
  if (kind_ != ChannelKind::unitary) {
    throw std::logic_error("unitary_matrix: channel is " + to_string(kind_));
  }
  return unitary_;
}

std::vector<Matrix> kraus_of(const ChannelSpec& spec) {
  switch (spec.kind()) {
    case ChannelKind::unitary:
      return {spec.unitary_matrix()};
    case ChannelKind::dephasing: {
      std::vector<std::vector<Matrix>> lists;
      for (double g : spec.parameters()) lists.push_back(dephasing_qubit(g));
      return prune_zero(tensor_lists(lists));
    }
    case ChannelKind::amplitude_damping: {
      std::vector<std::vector<Matrix>> lists;
      for (double g : spec.parameters()) lists.push_back(damping_qubit(g));
      return prune_zero(tensor_lists(lists));
    }
    case ChannelKind::depolarizing:
      return prune_zero(depolarizing_global(spec.num_qubits(), spec.parameters()[0]));
    case ChannelKind::depolarizing_local:
      return prune_zero(tensor_lists(std::vector<std::vector<Matrix>>(
          spec.num_qubits(), depolarizing_qubit(spec.parameters()[0]))));
    case ChannelKind::tensor_composite: {
      std::vector<std::vector<Matrix>> lists;
      for (const auto& p : spec.parts()) lists.push_back(kraus_of(p));
      return prune_zero(tensor_lists(lists));
    }
  }
  throw std::logic_error("kraus_of: unhandled kind");
}

Matrix stack_kraus(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("stack_kraus: empty list");
  const Index d = kraus.front().cols();
  Matrix out(static_cast<Index>(kraus.size()) * d, d);
  for (std::size_t l = 0; l < kraus.size(); ++l) {
    if (kraus[l].rows() != d || kraus[l].cols() != d) {
      throw std::invalid_argument("stack_kraus: Kraus operators differ in shape");
    }
    out.middleRows(static_cast<Index>(l) * d, d) = kraus[l];
  }
  return out;
}

std::vector<Matrix> unstack_kraus(const Matrix& stack, Index dim) {
  if (dim < 1 || stack.cols() != dim || stack.rows() % dim != 0) {
    throw std::invalid_argument("unstack_kraus: stack is " + std::to_string(stack.rows()) +
                                "x" + std::to_string(stack.cols()) +
                                ", not a multiple of " + std::to_string(dim));
  }
  std::vector<Matrix> out;
  for (Index l = 0; l < stack.rows() / dim; ++l) out.push_back(stack.middleRows(l * dim, dim));
  return out;
}

Matrix apply_kraus(const std::vector<Matrix>& kraus, const Matrix& rho) {
  if (kraus.empty()) throw std::invalid_argument("apply_kraus: empty list");
  if (rho.rows() != kraus.front().cols() || rho.cols() != rho.rows()) {
    throw std::invalid_argument("apply_kraus: state dimension " + std::to_string(rho.rows()) +
                                " does not match channel dimension " +
                                std::to_string(kraus.front().cols()));
  }
  Matrix out = Matrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

Matrix apply_kraus_stack(const Matrix& stack, const Matrix& rho) {
  const Index d = stack.cols();
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("apply_kraus_stack: dimension mismatch");
  }
  Matrix out = Matrix::Zero(d, d);
  for (Index l = 0; l < stack.rows() / d; ++l) {
    const auto k = stack.middleRows(l * d, d);
    out.noalias() += k * rho * k.adjoint();
  }
  return out;
}

double completeness_error(const std::vector<Matrix>& kraus) {
  const Index d = kraus.front().cols();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus) sum.noalias() += k.adjoint() * k;
  return (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

DensityMatrix apply_channel(const ChannelSpec& spec, const DensityMatrix& rho) {
  if (rho.rows() != spec.dimension() || rho.cols() != spec.dimension()) {
    throw std::invalid_argument("apply_channel: state is " + std::to_string(rho.rows()) + "x" +
                                std::to_string(rho.cols()) + ", channel acts on dimension " +
                                std::to_string(spec.dimension()));
  }
  return apply_kraus(kraus_of(spec), rho);
}

DensityMatrix apply_inverse_unitary(const ChannelSpec& spec, const DensityMatrix& rho) {
  if (!spec.is_unitary()) {
    throw std::invalid_argument("apply_inverse_unitary: " + to_string(spec.kind()) +
                                " channel has no CPTP inverse");
  }
  const Matrix& u = spec.unitary_matrix();
  if (rho.rows() != u.rows() || rho.cols() != u.cols()) {
    throw std::invalid_argument("apply_inverse_unitary: dimension mismatch");
  }
  return u.adjoint() * rho * u;
}

Matrix apply_effective_inverse(const ChannelSpec& spec, double epsilon, const Matrix& rho) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("apply_effective_inverse: epsilon must lie in [0, 1)");
  }
  return apply_inverse_unitary(spec, rho) / (1.0 - epsilon);
}

double ChoiMatrix::invariant_error(const Matrix& j, Index dim_in) {
  if (dim_in < 1 || j.rows() != dim_in * dim_in || j.cols() != j.rows()) {
    return std::numeric_limits<double>::infinity();
  }
  if (!j.allFinite()) return std::numeric_limits<double>::infinity();
  const double herm = (j - j.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(j), Eigen::EigenvaluesOnly);
  const double neg = std::max(0.0, -eig.eigenvalues().minCoeff());
  const double tp = (partial_trace(j, dim_in, dim_in, Subsystem::Y) -
                     Matrix::Identity(dim_in, dim_in))
                        .cwiseAbs()
                        .maxCoeff();
  return std::max({herm, neg, tp});
}

ChoiMatrix ChoiMatrix::from_matrix(Matrix j, Index dim_in) {
  const double err = invariant_error(j, dim_in);
  if (!(err <= kTolerance)) {
    throw std::invalid_argument("ChoiMatrix: invariants violated by " + std::to_string(err));
  }
  return ChoiMatrix(std::move(j), dim_in);
}

ChoiMatrix ChoiMatrix::from_kraus(const std::vector<Matrix>& kraus) {
  return from_kraus_stack(stack_kraus(kraus), kraus.front().cols());
}

ChoiMatrix ChoiMatrix::from_kraus_stack(const Matrix& stack, Index dim_in) {
  const Index d = dim_in;
  if (d * d > kMaxDimension) throw std::length_error("ChoiMatrix: dimension too large");
  const Index k = stack.rows() / d;
  // Column l of V is vec(K_l); J = V V^dagger.
  Matrix v(d * d, k);
  for (Index l = 0; l < k; ++l) {
    const Matrix kl = stack.middleRows(l * d, d);
    v.col(l) = vec(kl);
  }
  Matrix j = v * v.adjoint();
  j = hermitian_part(j);
  return from_matrix(std::move(j), d);
}

ChoiMatrix choi_of(const ChannelSpec& spec) { return ChoiMatrix::from_kraus(kraus_of(spec)); }

Matrix apply_choi(const ChoiMatrix& j, const Matrix& rho) {
  const Index d = j.dim_in();
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("apply_choi: state dimension " + std::to_string(rho.rows()) +
                                " does not match Choi input dimension " + std::to_string(d));
  }
  // Tr_X[(rho^T (x) I) J] = sum_{m,i} rho(m, i) J_{(m),(i)} block-wise.
  Matrix out = Matrix::Zero(d, d);
  const Matrix& jm = j.matrix();
  for (Index m = 0; m < d; ++m) {
    for (Index i = 0; i < d; ++i) {
      out += rho(m, i) * jm.block(m * d, i * d, d, d);
    }
  }
  return out;
}

Matrix transfer_matrix(const std::vector<Matrix>& kraus) {
  const Index d = kraus.front().cols();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& k : kraus) s += kron(k.conjugate(), k);
  return s;
}

Matrix transfer_matrix_from_stack(const Matrix& stack, Index dim) {
  return transfer_matrix(unstack_kraus(stack, dim));
}

Matrix transfer_from_choi(const Matrix& j, Index d) {
  if (j.rows() != d * d || j.cols() != d * d) {
    throw std::invalid_argument("transfer_from_choi: dimension mismatch");
  }
  Matrix s(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index a = 0; a < d; ++a)
      for (Index jj = 0; jj < d; ++jj)
        for (Index b = 0; b < d; ++b) s(b * d + a, jj * d + i) = j(i * d + a, jj * d + b);
  return s;
}

Matrix choi_from_transfer(const Matrix& s, Index d) {
  if (s.rows() != d * d || s.cols() != d * d) {
    throw std::invalid_argument("choi_from_transfer: dimension mismatch");
  }
  Matrix j(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index a = 0; a < d; ++a)
      for (Index jj = 0; jj < d; ++jj)
        for (Index b = 0; b < d; ++b) j(i * d + a, jj * d + b) = s(b * d + a, jj * d + i);
  return j;
}

Matrix choi_pseudoinverse(const ChoiMatrix& j) {
  const Index d = j.dim_in();
  return choi_from_transfer(pinv(transfer_from_choi(j.matrix(), d)), d);
}

std::string to_string(ScheduleKind kind) {
  return kind == ScheduleKind::homogeneous ? "homogeneous" : "inhomogeneous";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "homogeneous") return ScheduleKind::homogeneous;
  if (name == "inhomogeneous") return ScheduleKind::inhomogeneous;
  throw std::invalid_argument("unknown schedule '" + name + "'");
}

double gamma_at(const NoiseSchedule& schedule, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("gamma_at: t must be >= 0");
  if (!(schedule.beta >= 0.0)) throw std::invalid_argument("gamma_at: beta must be >= 0");
  const double exponent = schedule.kind == ScheduleKind::homogeneous
                              ? 2.0 * schedule.beta * t
                              : schedule.beta * t * t;
  return -std::expm1(-exponent);
}

std::string to_config_text(const ChannelSpec& spec) {
  std::string out;
  write_keys(spec, "", out);
  return out;
}

ChannelSpec parse_channel_spec(const std::string& text) {
  KeyValues kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    if (kv.contains(key)) throw ConfigError(key, "given twice");
    kv[key] = trim(line.substr(eq + 1));
  }
  return spec_from_keys_checked(kv);
}

}  // namespace cqpt
