#pragma once

#include <cstdint>
#include <optional>

#include "uio/plant.hpp"
#include "uio/signals.hpp"

namespace uio {

/// Joint plant/observer trajectory over t = 0..T (T+1 samples, column t).
template <typename Scalar>
struct BasicRunTrace {
  Mat<Scalar> x, u, d, y, z, x_hat, e;

  Eigen::Index samples() const { return x.cols(); }
};

using RunTrace = BasicRunTrace<double>;

/// Simulates T steps.  Signals are drawn from streams kInput / kDisturbance of
/// `seed` (length T+1 so that y(T) is defined).  Explicit policies must
/// provide T+1 samples.
template <typename Scalar>
BasicRunTrace<Scalar> run(const BasicStateSpaceModel<Scalar>& model, const BasicUioRealization<Scalar>& uio,
                          Eigen::Index T, const SignalPolicy& input, const SignalPolicy& disturbance,
                          const Vec<Scalar>& x0, const Vec<Scalar>& z0, std::uint64_t seed);

/// z0 for which e(0) = 0 given x0 and the first input/disturbance samples.
template <typename Scalar>
Vec<Scalar> matching_initial_state(const BasicStateSpaceModel<Scalar>& model,
                                   const BasicUioRealization<Scalar>& uio, const Vec<Scalar>& x0,
                                   const Vec<Scalar>& u0, const Vec<Scalar>& d0);

struct RecursionCheck {
  bool passed = true;
  double max_residual = 0.0;
};

/// max_t |e(t+1) - A_uio e(t)| < tol * (1 + max|e|).
template <typename Scalar>
RecursionCheck check_error_recursion(const BasicRunTrace<Scalar>& trace, const Mat<Scalar>& a_uio, double tol);

struct ConvergenceStats {
  double final_error_norm = 0.0;
  /// Least-squares slope of log||e(t)|| over the second half of the trace,
  /// skipping samples below kNumericalZero.  Empty when fewer than two
  /// samples remain.
  std::optional<double> log_decay;
};

inline constexpr double kNumericalZero = 1e-14;

template <typename Scalar>
ConvergenceStats convergence_stats(const BasicRunTrace<Scalar>& trace);

/// Log-decay fit on an explicit sequence of error norms (same rules as above).
ConvergenceStats convergence_stats_from_norms(const std::vector<double>& norms);

}  // namespace uio
