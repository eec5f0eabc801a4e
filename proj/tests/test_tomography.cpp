#include <doctest.h>

#include <sstream>

#include "cqpt/metrics.hpp"
#include "cqpt/tomography.hpp"

using namespace cqpt;

namespace {

Matrix hadamard() {
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::sqrt(2.0);
}

TrainingDataset single(const Matrix& w) {
  TrainingDataset data;
  data.num_qubits = 1;
  data.unitaries = {w};
  data.kets = {w.col(0)};
  return data;
}

double rel_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

TEST_CASE("dataset sizes and determinism") {
  RngStream r1(3), r2(3);
  CHECK(default_dataset_size(1) == 6);
  CHECK(default_dataset_size(2) == 36);
  const auto a = make_dataset(2, 0, r1);
  const auto b = make_dataset(2, 0, r2);
  REQUIRE(a.size() == 36);
  for (Index i = 0; i < a.size(); ++i) {
    CHECK(is_unitary(a.unitaries[i], 1e-10));
    CHECK((a.unitaries[i] - b.unitaries[i]).norm() == 0.0);
  }
  const auto split = make_split(1, 0, 0, RngStream(3));
  CHECK(split.train.size() == 6);
  CHECK((split.train.unitaries[0] - split.test.unitaries[0]).norm() > 1e-3);
}

TEST_CASE("Kraus cost hand values") {
  const ChannelSpec x = ChannelSpec::unitary(pauli_x());
  CHECK(cost_kraus(Matrix::Identity(2, 2), x, single(Matrix::Identity(2, 2))) ==
        doctest::Approx(1.0));
  CHECK(cost_kraus(pauli_x(), x, single(Matrix::Identity(2, 2))) < 1e-15);
  CHECK_THROWS_AS(cost_kraus(pauli_x(), ChannelSpec::dephasing(1, 0.1),
                             single(Matrix::Identity(2, 2))),
                  std::invalid_argument);
}

TEST_CASE("Kraus fixed point and cost bounds") {
  RngStream rng(4);
  for (int n = 1; n <= 3; ++n) {
    const Index d = Index{1} << n;
    const ChannelSpec u = ChannelSpec::unitary(haar_unitary(d, rng));
    const auto data = make_dataset(n, 0, rng);
    CHECK(cost_kraus(u.unitary_matrix(), u, data) <= 1e-12);
    const StiefelPoint exact = StiefelPoint::from_matrix(u.unitary_matrix());
    CHECK(project_to_tangent(exact, grad_kraus(exact, u, data)).matrix().norm() < 1e-8);
    const StiefelPoint random = StiefelPoint::random(2 * d, d, rng);
    const double c = cost_kraus(random, u, data);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("Kraus gradient matches central differences") {
  RngStream rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + rep % 2;
    const Index d = Index{1} << n;
    const ChannelSpec u = ChannelSpec::unitary(haar_unitary(d, rng));
    const auto data = make_dataset(n, 0, rng);
    const StiefelPoint x = StiefelPoint::random(d * d, d, rng);
    const Matrix analytic = grad_kraus(x, u, data);
    const Matrix fd = finite_difference_gradient(
        [&](const Matrix& m) { return cost_kraus(m, u, data); }, x.matrix());
    CHECK(rel_error(analytic, fd) < 1e-5);
  }
}

TEST_CASE("Kraus cost decreases along the negative Riemannian gradient") {
  RngStream rng(6);
  const ChannelSpec u = ChannelSpec::unitary(haar_unitary(2, rng));
  const auto data = make_dataset(1, 0, rng);
  const StiefelPoint x = StiefelPoint::random(4, 2, rng);
  const TangentVector g = project_to_tangent(x, grad_kraus(x, u, data));
  const double c0 = cost_kraus(x, u, data);
  const double c1 = cost_kraus(retract(x, g * -1e-3, Retraction::cayley), u, data);
  CHECK(c1 < c0);
}

TEST_CASE("Choi cost fixed point for noisy channels") {
  RngStream rng(7);
  for (int n = 1; n <= 2; ++n) {
    const auto data = make_dataset(n, 0, rng);
    for (double g : {0.1, 0.5, 0.9}) {
      for (const auto& spec : {ChannelSpec::dephasing(n, g), ChannelSpec::depolarizing(n, g),
                               ChannelSpec::amplitude_damping(n, g)}) {
        CHECK(cost_choi(choi_of(spec), spec, data) <= 1e-8);
        CHECK(cost_choi(choi_of(spec), spec, data, OverlapMode::normalized) <= 1e-8);
      }
    }
  }
}

TEST_CASE("Choi cost of identity against full dephasing on |+> is 3/4") {
  const ChoiMatrix id = choi_of(ChannelSpec::identity(1));
  CHECK(cost_choi(id, ChannelSpec::dephasing(1, 1.0), single(hadamard())) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("Choi cost literal form agrees with the transfer-matrix form") {
  RngStream rng(8);
  const auto data = make_dataset(2, 0, rng);
  const ChannelSpec target = ChannelSpec::amplitude_damping(2, 0.3);
  const ChoiObjective obj(target, data);
  for (int rep = 0; rep < 5; ++rep) {
    const StiefelPoint x = identity_anchored_stack(4, 16, 0.2, rng);
    const ChoiMatrix j = ChoiMatrix::from_kraus_stack(x.matrix(), 4);
    CHECK(std::abs(cost_choi(j, target, data, OverlapMode::normalized) -
                   obj.cost(x.matrix(), OverlapMode::normalized)) < 1e-12);
    CHECK(std::abs(cost_choi(j, target, data, OverlapMode::raw) -
                   obj.cost(x.matrix(), OverlapMode::raw)) < 1e-12);
    const double c = obj.cost(x.matrix());
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("Choi gradient matches central differences") {
  RngStream rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + rep % 2;
    const Index d = Index{1} << n;
    const auto data = make_dataset(n, 0, rng);
    const ChannelSpec target = rep % 3 == 0   ? ChannelSpec::dephasing(n, 0.4)
                               : rep % 3 == 1 ? ChannelSpec::depolarizing(n, 0.3)
                                              : ChannelSpec::amplitude_damping(n, 0.6);
    const ChoiObjective obj(target, data);
    const StiefelPoint x = identity_anchored_stack(d, d * d, 0.3, rng);
    const Matrix fd = finite_difference_gradient(
        [&](const Matrix& m) { return obj.cost(m); }, x.matrix());
    CHECK(rel_error(obj.gradient(x.matrix()), fd) < 1e-5);
  }
}

TEST_CASE("train_kraus reaches the N = 1 target") {
  RngStream rng(11);
  const ChannelSpec u = ChannelSpec::unitary(haar_unitary(2, rng));
  const auto split = make_split(1, 0, 0, rng);
  TrainerConfig cfg;
  cfg.max_iters = 500;
  cfg.cost_tol = 1e-6;
  const TrainingTrace t = train_kraus(u, split.train, cfg, rng);
  CHECK(t.final_cost < 1e-4);
  CHECK(t.final_cost <= t.initial_cost);
  CHECK(orthonormality_error(t.stack) < 1e-10);
  CHECK(static_cast<int>(t.records.size()) <= cfg.max_iters);
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    CHECK(t.records[i].cost <= t.records[i - 1].cost);
  }
  CHECK(evaluate_kraus(t.stack, u, split.test) < 1e-3);
}

TEST_CASE("train_choi keeps Choi invariants and reconstructs weak dephasing") {
  RngStream rng(12);
  const ChannelSpec target = ChannelSpec::dephasing(1, 0.01);
  const auto split = make_split(1, 0, 20, rng);
  TrainerConfig cfg;
  cfg.max_iters = 300;
  const TrainingTrace t = train_choi(target, split.train, cfg, rng);
  REQUIRE(t.choi.has_value());
  CHECK(ChoiMatrix::invariant_error(t.choi->matrix(), 2) < 1e-9);
  const ChoiEvaluation ev = evaluate_choi(*t.choi, target, split.test);
  CHECK(ev.output_infidelity < 1e-2);
  CHECK(t.final_cost <= t.initial_cost);
}

TEST_CASE("train_choi on a unitary reproduces conjugation") {
  RngStream rng(13);
  const Matrix u = haar_unitary(2, rng);
  const ChannelSpec target = ChannelSpec::unitary(u);
  const auto split = make_split(1, 0, 5, rng);
  TrainerConfig cfg;
  cfg.max_iters = 1000;
  cfg.cost_tol = 1e-10;
  const TrainingTrace t = train_choi(target, split.train, cfg, rng);
  const Matrix rho = split.test.state(0);
  CHECK((reconstruct_state(*t.choi, rho) - u * rho * u.adjoint()).norm() < 1e-2);
}

TEST_CASE("reconstruct_state and recover_input") {
  RngStream rng(14);
  const auto data = make_dataset(2, 4, rng);
  const ChoiMatrix id = choi_of(ChannelSpec::identity(2));
  const ChannelSpec damp = ChannelSpec::amplitude_damping(2, 0.4);
  const ChoiMatrix jd = choi_of(damp);
  for (Index i = 0; i < data.size(); ++i) {
    const Matrix rho = data.state(i);
    CHECK((reconstruct_state(id, rho) - rho).norm() < 1e-12);
    CHECK(std::abs(reconstruct_state(jd, rho).trace() - Scalar(1.0)) < 1e-12);
    CHECK((recover_input(jd, apply_channel(damp, rho)) - rho).norm() < 1e-8);
  }
  const ChoiEvaluation ev = evaluate_choi(jd, damp, data);
  CHECK(ev.input_infidelity < 1e-7);
  CHECK(ev.output_infidelity < 1e-7);
}

TEST_CASE("optimizer flags a missing analytic gradient") {
  RngStream rng(15);
  Objective obj;
  obj.cost = [](const Matrix& m) { return 1.0 - std::norm(m(0, 0)); };
  TrainerConfig cfg;
  cfg.max_iters = 3;
  const TrainingTrace t = optimize(obj, StiefelPoint::random(2, 1, rng), cfg);
  CHECK(t.gradient_fallback);
  CHECK(t.records.size() <= 3);
}

TEST_CASE("trainer config validation names the field") {
  TrainerConfig cfg;
  cfg.learning_rate = 0.0;
  try {
    cfg.validate();
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "learning_rate");
  }
}

TEST_CASE("trace CSV is deterministic without timing") {
  RngStream r1(16);
  const ChannelSpec u = ChannelSpec::unitary(pauli_x());
  const auto data = make_dataset(1, 0, r1);
  TrainerConfig cfg;
  cfg.max_iters = 20;
  RngStream a = r1, b = r1;
  std::ostringstream s1, s2;
  write_trace_csv(s1, train_kraus(u, data, cfg, a));
  write_trace_csv(s2, train_kraus(u, data, cfg, b));
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().starts_with("iteration,cost,grad_norm,elapsed_ms\n0,"));
  CHECK(s1.str().find(",nan\n") != std::string::npos);
}

TEST_CASE("infidelity hand values") {
  Matrix zero = Matrix::Zero(2, 2), one = Matrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  one(1, 1) = 1.0;
  CHECK(infidelity(zero, zero) < 1e-15);
  CHECK(infidelity(zero, one) == doctest::Approx(1.0));
  CHECK(infidelity(zero, Matrix::Identity(2, 2) / 2.0) ==
        doctest::Approx(1 - std::sqrt(0.5)).epsilon(1e-14));
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(infidelity(bad, zero), NumericalError);
}

TEST_CASE("infidelity is symmetric and vanishes only on equal states") {
  RngStream rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix a = complex_gaussian(4, 4, rng), b = complex_gaussian(4, 4, rng);
    Matrix rho = a * a.adjoint(), sigma = b * b.adjoint();
    rho /= rho.trace().real();
    sigma /= sigma.trace().real();
    CHECK(std::abs(infidelity(rho, sigma) - infidelity(sigma, rho)) < 1e-10);
    CHECK(infidelity(rho, rho) < 1e-12);
    CHECK(infidelity(rho, sigma) > 1e-6);
  }
  // Pure states: 1 - |<psi|phi>|.
  const Vector psi = haar_unitary(4, rng).col(0), phi = haar_unitary(4, rng).col(0);
  CHECK(infidelity(projector(psi), projector(phi)) ==
        doctest::Approx(1 - std::abs(psi.dot(phi))).epsilon(1e-10));
}

TEST_CASE("sigma_x expectation") {
  const Vector plus = Vector::Constant(2, 1 / std::sqrt(2.0));
  const Matrix pp = kron(projector(plus), projector(plus));
  CHECK(expect_sigma_x_first(pp) == doctest::Approx(1.0));
  const double t = 4.0, beta = 0.1;
  const double g_hom = gamma_at({ScheduleKind::homogeneous, beta}, t);
  const double g_inh = gamma_at({ScheduleKind::inhomogeneous, beta}, t);
  CHECK(expect_sigma_x_first(apply_channel(ChannelSpec::dephasing(2, g_hom), pp)) ==
        doctest::Approx(std::exp(-beta * t)).epsilon(1e-12));
  CHECK(expect_sigma_x_first(apply_channel(ChannelSpec::dephasing(2, g_inh), pp)) ==
        doctest::Approx(std::exp(-beta * t * t / 2)).epsilon(1e-12));
  CHECK_THROWS_AS(expect_sigma_x_first(Matrix::Identity(2, 2)), std::invalid_argument);
}
