#pragma once

#include <string>
#include <vector>

#include "uio/numkit.hpp"
#include "uio/types.hpp"

namespace uio {

/// Discrete-time plant
///   x(t+1) = A x(t) + B u(t) + E d(t)
///   y(t)   = C x(t) + D u(t) + F d(t)
/// with known input u and unknown input d.  The struct itself does not
/// enforce its invariants; use make_model() or validate().
template <typename Scalar>
struct BasicStateSpaceModel {
  Mat<Scalar> A, B, C, D, E, F;
  std::string name;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }
  Eigen::Index r() const { return E.cols(); }

  /// [E; F]
  Mat<Scalar> disturbance_map() const;

  template <typename To>
  BasicStateSpaceModel<To> cast() const {
    return {A.template cast<To>(), B.template cast<To>(), C.template cast<To>(),
            D.template cast<To>(), E.template cast<To>(), F.template cast<To>(), name};
  }
};

/// Observer
///   z(t+1) = A_uio z(t) + B_u u(t) + B_y y(t)
///   xhat(t) = z(t) + D_u u(t) + D_y y(t)
template <typename Scalar>
struct BasicUioRealization {
  Mat<Scalar> A_uio, B_u, B_y, D_u, D_y;

  template <typename To>
  BasicUioRealization<To> cast() const {
    return {A_uio.template cast<To>(), B_u.template cast<To>(), B_y.template cast<To>(),
            D_u.template cast<To>(), D_y.template cast<To>()};
  }
};

using StateSpaceModel = BasicStateSpaceModel<double>;
using UioRealization = BasicUioRealization<double>;

template <typename Scalar>
struct StepResult {
  Vec<Scalar> x_next;
  Vec<Scalar> y;
};

inline constexpr const char* kDimensionViolation = "dimension mismatch";
inline constexpr const char* kRankViolation = "disturbance map rank-deficient";

/// Empty iff all dimensions agree and [E; F] has full column rank.  Each
/// entry starts with kDimensionViolation or kRankViolation.
std::vector<std::string> validate(const StateSpaceModel& model, const RankTolerance& tol = {});

/// Builds a model and throws kInvalidModel listing the violations.
StateSpaceModel make_model(Matrix A, Matrix B, Matrix C, Matrix D, Matrix E, Matrix F,
                           std::string name = {}, const RankTolerance& tol = {});

void require_valid(const StateSpaceModel& model, const RankTolerance& tol = {});

/// Replaces [E; F] by an orthonormal basis of its column space, so that the
/// disturbance map has full column rank.  Returns the model unchanged when it
/// already has.
StateSpaceModel reduce_disturbance(const StateSpaceModel& model, const RankTolerance& tol = {});

/// Constant minimal left annihilator [M_E M_F] of [E; F]: orthonormal rows,
/// shape (n+p-r) x (n+p).
Matrix mla_ef(const StateSpaceModel& model, const RankTolerance& tol = {});

template <typename Scalar>
StepResult<Scalar> step(const BasicStateSpaceModel<Scalar>& model, const Vec<Scalar>& x, const Vec<Scalar>& u,
                        const Vec<Scalar>& d);

/// Generator of every two-step window (x, x+, u, u+, y, y+) the plant can
/// produce: columns are the images of the canonical basis of (x, u, u+, d, d+).
/// Shape 2(n+m+p) x (n+2m+2r).
template <typename Scalar>
Mat<Scalar> consistency_matrix(const BasicStateSpaceModel<Scalar>& model);

/// Stacked window (x, x+, u, u+, y, y+) for one transition.
Vector stack_window(const Vector& x, const Vector& x_next, const Vector& u, const Vector& u_next,
                    const Vector& y, const Vector& y_next);

}  // namespace uio
