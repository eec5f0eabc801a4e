#pragma once

// Complex Stiefel manifold {X in C^{n x p} : X^dagger X = I}.

#include <string>

#include "cqpt/qla.hpp"
#include "cqpt/types.hpp"

namespace cqpt {

class StiefelPoint {
 public:
  static constexpr double kTolerance = 1e-10;

  /// Validates X^dagger X = I to kTolerance.
  static StiefelPoint from_matrix(Matrix x);
  /// Thin-QR projection of an arbitrary full-column-rank matrix.
  static StiefelPoint orthonormalized(const Matrix& m);
  static StiefelPoint random(Index rows, Index cols, RngStream& rng);

  const Matrix& matrix() const noexcept { return x_; }
  Index rows() const noexcept { return x_.rows(); }
  Index cols() const noexcept { return x_.cols(); }

 private:
  explicit StiefelPoint(Matrix x) : x_(std::move(x)) {}
  Matrix x_;
};

/// max |X^dagger X - I|
double orthonormality_error(const Matrix& x);

/// Tangent direction at some base point. Tangency is a property relative to
/// that base; check it with tangent_error().
class TangentVector {
 public:
  explicit TangentVector(Matrix v) : v_(std::move(v)) {}
  const Matrix& matrix() const noexcept { return v_; }

  TangentVector operator*(double s) const { return TangentVector(s * v_); }
  friend TangentVector operator*(double s, const TangentVector& t) { return t * s; }

 private:
  Matrix v_;
};

/// max |X^dagger V + V^dagger X|
double tangent_error(const StiefelPoint& base, const TangentVector& v);

/// G - X Sym(X^dagger G)
TangentVector project_to_tangent(const StiefelPoint& base, const Matrix& euclid_grad);

enum class Retraction { qr, polar, cayley, exponential };

std::string to_string(Retraction r);
Retraction retraction_from_string(const std::string& name);

/// Drift beyond which a retracted point is re-orthonormalized by QR.
inline constexpr double kDriftTolerance = 1e-10;

/// Maps base + step back onto the manifold.
///   qr           thin QR of X + V (first order)
///   polar        polar factor of X + V (second order, Euclidean metric)
///   cayley       cayley_update with alpha = 1 (second order, canonical metric)
///   exponential  canonical-metric geodesic expm(W) X
StiefelPoint retract(const StiefelPoint& base, const TangentVector& step, Retraction method);

/// Cayley step (I - a/2 W)^{-1} (I + a/2 W) X with the skew-Hermitian
///   W = P V X^dagger - X V^dagger P,   P = I - X X^dagger / 2,
/// which satisfies W X = V for tangent V. W = U Z^dagger with U = [PV, X],
/// Z = [X, -PV], so only a 2p x 2p system is solved.
/// iterations = 0 solves exactly; otherwise runs the fixed point
/// Y <- X + (a/2) W (X + Y) from Y = X + a V that many times.
/// For tangent V the system is invertible in exact arithmetic (W is
/// skew-Hermitian); NumericalError is raised only when it is numerically
/// singular, which in practice means non-finite or wildly non-tangent input.
Matrix cayley_update(const StiefelPoint& base, const TangentVector& v, double alpha,
                     int iterations = 0);

/// Canonical-metric geodesic expm(t W) X with W as in cayley_update.
Matrix canonical_geodesic(const StiefelPoint& base, const TangentVector& v, double t);

/// Euclidean-metric geodesic
///   [X, V] expm(t [[A, -S], [I, A]]) [I; 0] expm(-t A),  A = X^dagger V, S = V^dagger V.
Matrix euclidean_geodesic(const StiefelPoint& base, const TangentVector& v, double t);

}  // namespace cqpt
