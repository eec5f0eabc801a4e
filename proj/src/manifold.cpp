#include "cqpt/manifold.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace cqpt {
namespace {

void check_shape(const StiefelPoint& base, const Matrix& m, const char* who) {
  if (m.rows() != base.rows() || m.cols() != base.cols()) {
    throw std::invalid_argument(std::string(who) + ": direction is " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                ", base is " + std::to_string(base.rows()) + "x" +
                                std::to_string(base.cols()));
  }
}

struct LowRank {
  Matrix u;  // [PV, X]
  Matrix z;  // [X, -PV]
};

LowRank cayley_factors(const Matrix& x, const Matrix& v) {
  const Index p = x.cols();
  const Matrix pv = v - 0.5 * x * (x.adjoint() * v);
  LowRank f{Matrix(x.rows(), 2 * p), Matrix(x.rows(), 2 * p)};
  f.u << pv, x;
  f.z << x, -pv;
  return f;
}

Matrix polar_factor(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("polar: SVD did not converge");
  if (svd.singularValues().minCoeff() <= 0.0) {
    throw NumericalError("polar: rank-deficient step");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

double orthonormality_error(const Matrix& x) {
  return (x.adjoint() * x - Matrix::Identity(x.cols(), x.cols())).cwiseAbs().maxCoeff();
}

StiefelPoint StiefelPoint::from_matrix(Matrix x) {
  if (x.rows() < x.cols() || x.cols() < 1) {
    throw std::invalid_argument("StiefelPoint: need rows >= cols >= 1");
  }
  const double err = orthonormality_error(x);
  if (!(err <= kTolerance)) {
    throw std::invalid_argument("StiefelPoint: orthonormality error " + std::to_string(err));
  }
  return StiefelPoint(std::move(x));
}

StiefelPoint StiefelPoint::orthonormalized(const Matrix& m) {
  if (m.rows() < m.cols() || m.cols() < 1) {
    throw std::invalid_argument("StiefelPoint: need rows >= cols >= 1");
  }
  if (!m.allFinite()) throw NumericalError("StiefelPoint: non-finite entries");
  return StiefelPoint(orthonormalize(m));
}

StiefelPoint StiefelPoint::random(Index rows, Index cols, RngStream& rng) {
  return orthonormalized(complex_gaussian(rows, cols, rng));
}

double tangent_error(const StiefelPoint& base, const TangentVector& v) {
  const Matrix a = base.matrix().adjoint() * v.matrix();
  return (a + a.adjoint()).cwiseAbs().maxCoeff();
}

TangentVector project_to_tangent(const StiefelPoint& base, const Matrix& euclid_grad) {
  check_shape(base, euclid_grad, "project_to_tangent");
  const Matrix& x = base.matrix();
  return TangentVector(euclid_grad - x * hermitian_part(x.adjoint() * euclid_grad));
}

std::string to_string(Retraction r) {
  switch (r) {
    case Retraction::qr: return "qr";
    case Retraction::polar: return "polar";
    case Retraction::cayley: return "cayley";
    case Retraction::exponential: return "exponential";
  }
  return "?";
}

Retraction retraction_from_string(const std::string& name) {
  for (auto r : {Retraction::qr, Retraction::polar, Retraction::cayley,
                 Retraction::exponential}) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown retraction '" + name + "'");
}

Matrix cayley_update(const StiefelPoint& base, const TangentVector& v, double alpha,
                     int iterations) {
  check_shape(base, v.matrix(), "cayley_update");
  if (!(alpha >= 0.0)) throw std::invalid_argument("cayley_update: alpha must be >= 0");
  if (iterations < 0) throw std::invalid_argument("cayley_update: negative iterations");
  const Matrix& x = base.matrix();
  if (alpha == 0.0) return x;
  const LowRank f = cayley_factors(x, v.matrix());

  if (iterations > 0) {
    Matrix y = x + alpha * v.matrix();
    for (int i = 0; i < iterations; ++i) {
      y = x + (alpha / 2.0) * (f.u * (f.z.adjoint() * (x + y)));
    }
    return y;
  }

  const Index m = f.u.cols();
  const Matrix small = Matrix::Identity(m, m) - (alpha / 2.0) * (f.z.adjoint() * f.u);
  Eigen::PartialPivLU<Matrix> lu(small);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    throw NumericalError("cayley_update: singular solve (rcond " + std::to_string(rcond) +
                         ")");
  }
  return x + alpha * (f.u * lu.solve(f.z.adjoint() * x));
}

Matrix canonical_geodesic(const StiefelPoint& base, const TangentVector& v, double t) {
  check_shape(base, v.matrix(), "canonical_geodesic");
  const Matrix& x = base.matrix();
  const LowRank f = cayley_factors(x, v.matrix());
  // expm(t U Z^dagger) X = X + U phi(t Z^dagger U) t Z^dagger X, with phi read off
  // the top-right block of expm([[M, B], [0, 0]]).
  const Index m = f.u.cols();
  const Index p = x.cols();
  Matrix aug = Matrix::Zero(m + p, m + p);
  aug.topLeftCorner(m, m) = t * (f.z.adjoint() * f.u);
  aug.topRightCorner(m, p) = t * (f.z.adjoint() * x);
  const Matrix e = aug.exp();
  return x + f.u * e.topRightCorner(m, p);
}

Matrix euclidean_geodesic(const StiefelPoint& base, const TangentVector& v, double t) {
  check_shape(base, v.matrix(), "euclidean_geodesic");
  const Matrix& x = base.matrix();
  const Index p = x.cols();
  const Matrix a = x.adjoint() * v.matrix();
  const Matrix s = v.matrix().adjoint() * v.matrix();
  Matrix block(2 * p, 2 * p);
  block << a, -s, Matrix::Identity(p, p), a;
  const Matrix e = Matrix(t * block).exp();
  Matrix xv(x.rows(), 2 * p);
  xv << x, v.matrix();
  return xv * e.leftCols(p) * Matrix(-t * a).exp();
}

StiefelPoint retract(const StiefelPoint& base, const TangentVector& step, Retraction method) {
  check_shape(base, step.matrix(), "retract");
  if (!step.matrix().allFinite()) throw NumericalError("retract: non-finite step");
  Matrix y;
  switch (method) {
    case Retraction::qr:
      return StiefelPoint::orthonormalized(base.matrix() + step.matrix());
    case Retraction::polar:
      y = polar_factor(base.matrix() + step.matrix());
      break;
    case Retraction::cayley:
      y = cayley_update(base, step, 1.0);
      break;
    case Retraction::exponential:
      y = canonical_geodesic(base, step, 1.0);
      break;
  }
  if (!y.allFinite()) throw NumericalError("retract: non-finite result");
  if (orthonormality_error(y) > kDriftTolerance) {
    return StiefelPoint::orthonormalized(y);
  }
  return StiefelPoint::from_matrix(std::move(y));
}

}  // namespace cqpt
