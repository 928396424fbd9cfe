#pragma once

#include <cstdint>
#include <optional>

#include "uio/numkit.hpp"
#include "uio/plant.hpp"
#include "uio/signals.hpp"

namespace uio {

/// Offline experiment record; column t of each matrix is the sample at time t.
/// `d` is present only for synthetic experiments and is never used by the
/// designer.
struct HistoricalData {
  Matrix x;
  Matrix u;
  Matrix y;
  std::optional<Matrix> d;

  Eigen::Index length() const { return x.cols(); }
  bool synthetic() const { return d.has_value(); }
};

struct Dims {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::Index p = 0;
  std::optional<Eigen::Index> r;
};

/// Past/future blocks.  Phi stacks (X_p, X_f, U_p, U_f, Y_p, Y_f) in that order.
struct DataBlocks {
  Matrix X_p, X_f, U_p, U_f, Y_p, Y_f;
  std::optional<Matrix> D_p, D_f;
  Matrix Phi;

  Eigen::Index n() const { return X_p.rows(); }
  Eigen::Index m() const { return U_p.rows(); }
  Eigen::Index p() const { return Y_p.rows(); }
  Eigen::Index columns() const { return Phi.cols(); }
};

/// Runs the plant for T samples (t = 0..T-1) from x0.  Input and
/// disturbance draws come from streams kInput / kDisturbance of `seed`.
HistoricalData collect(const StateSpaceModel& model, Eigen::Index T, const SignalPolicy& input,
                       const SignalPolicy& disturbance, const Vector& x0, std::uint64_t seed);

/// Throws kInvalidArgument when lengths disagree or T < 2.
void check_lengths(const HistoricalData& data);

DataBlocks build_blocks(const HistoricalData& data, const Dims& dims);

/// Each nonzero column scaled to unit norm.  Recorded windows of an unstable
/// plant span many orders of magnitude; scaling columns leaves the image and
/// the rank unchanged but keeps small early windows above the rank threshold.
/// Every rank or subspace decision on data goes through it.
Matrix column_normalized(const Matrix& m);

/// Full row rank of (X_p, U_p, U_f, D_p, D_f).  Throws
/// kMissingDisturbanceRecord without disturbance blocks.
bool assumption_holds(const DataBlocks& blocks, const RankTolerance& tol = {});

/// Necessary part of the assumption that does not involve d: full row rank
/// of (X_p, U_p, U_f).  The only check available for measured data.
struct ExcitationReport {
  int rank = 0;
  int target = 0;
  bool full_row_rank() const { return rank == target; }
};
ExcitationReport surrogate_excitation(const DataBlocks& blocks, const RankTolerance& tol = {});

/// Depth-`depth` block-Hankel matrix of a q x L signal: (q*depth) x (L-depth+1).
Matrix block_hankel(const Matrix& signal, Eigen::Index depth);

/// Persistency of excitation of the given order.
bool pe_order(const Matrix& signal, Eigen::Index order, const RankTolerance& tol = {});

/// Distance from `window` to Im(Phi).
double projection_residual(const Vector& window, const DataBlocks& blocks, const RankTolerance& tol = {});

/// True iff the window (x, x+, u, u+, y, y+) lies in Im(Phi).
bool compatible(const Vector& window, const DataBlocks& blocks, const RankTolerance& tol = {});

}  // namespace uio
