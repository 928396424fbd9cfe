#include "uio/datalog.hpp"

#include <string>

namespace uio {

void check_lengths(const HistoricalData& data) {
  const auto T = data.x.cols();
  if (T < 2) throw Error(ErrorCode::kInvalidArgument, "historical data needs T >= 2 samples");
  if (data.u.cols() != T || data.y.cols() != T || (data.d && data.d->cols() != T)) {
    throw Error(ErrorCode::kInvalidArgument, "historical sequences have different lengths");
  }
}

HistoricalData collect(const StateSpaceModel& model, Eigen::Index T, const SignalPolicy& input,
                       const SignalPolicy& disturbance, const Vector& x0, std::uint64_t seed) {
  if (T < 2) throw Error(ErrorCode::kInvalidArgument, "collect: T must be at least 2");
  if (x0.size() != model.n()) throw Error(ErrorCode::kDimensionMismatch, "collect: x0 has wrong size");
  SampleStream input_stream(seed, static_cast<std::uint32_t>(Stream::kInput));
  SampleStream disturbance_stream(seed, static_cast<std::uint32_t>(Stream::kDisturbance));

  HistoricalData data;
  data.u = realize(input, model.m(), T, input_stream);
  data.d = realize(disturbance, model.r(), T, disturbance_stream);
  data.x.resize(model.n(), T);
  data.y.resize(model.p(), T);
  Vector x = x0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto out = step<double>(model, x, data.u.col(t), data.d->col(t));
    data.x.col(t) = x;
    data.y.col(t) = out.y;
    x = out.x_next;
  }
  return data;
}

DataBlocks build_blocks(const HistoricalData& data, const Dims& dims) {
  check_lengths(data);
  if (data.x.rows() != dims.n || data.u.rows() != dims.m || data.y.rows() != dims.p) {
    throw Error(ErrorCode::kDimensionMismatch,
                "data has (n,m,p) = (" + std::to_string(data.x.rows()) + "," + std::to_string(data.u.rows()) + "," +
                    std::to_string(data.y.rows()) + "), expected (" + std::to_string(dims.n) + "," +
                    std::to_string(dims.m) + "," + std::to_string(dims.p) + ")");
  }
  if (dims.r && data.d && data.d->rows() != *dims.r) {
    throw Error(ErrorCode::kDimensionMismatch, "disturbance record has the wrong number of channels");
  }
  const auto cols = data.length() - 1;
  DataBlocks b;
  b.X_p = data.x.leftCols(cols);
  b.X_f = data.x.rightCols(cols);
  b.U_p = data.u.leftCols(cols);
  b.U_f = data.u.rightCols(cols);
  b.Y_p = data.y.leftCols(cols);
  b.Y_f = data.y.rightCols(cols);
  if (data.d) {
    b.D_p = data.d->leftCols(cols);
    b.D_f = data.d->rightCols(cols);
  }
  b.Phi.resize(2 * (dims.n + dims.m + dims.p), cols);
  b.Phi << b.X_p, b.X_f, b.U_p, b.U_f, b.Y_p, b.Y_f;
  return b;
}

Matrix column_normalized(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

bool assumption_holds(const DataBlocks& blocks, const RankTolerance& tol) {
  if (!blocks.D_p || !blocks.D_f) {
    throw Error(ErrorCode::kMissingDisturbanceRecord,
                "the data assumption involves the unknown input and cannot be checked without its record");
  }
  const auto r = blocks.D_p->rows();
  const auto rows = blocks.n() + 2 * blocks.m() + 2 * r;
  if (blocks.columns() < rows) return false;
  Matrix stack(rows, blocks.columns());
  stack << blocks.X_p, blocks.U_p, blocks.U_f, *blocks.D_p, *blocks.D_f;
  return rank<double>(column_normalized(stack), tol) == rows;
}

ExcitationReport surrogate_excitation(const DataBlocks& blocks, const RankTolerance& tol) {
  const auto rows = blocks.n() + 2 * blocks.m();
  Matrix stack(rows, blocks.columns());
  stack << blocks.X_p, blocks.U_p, blocks.U_f;
  return {rank<double>(column_normalized(stack), tol), static_cast<int>(rows)};
}

Matrix block_hankel(const Matrix& signal, Eigen::Index depth) {
  const auto q = signal.rows();
  const auto len = signal.cols();
  if (depth < 1 || len < depth) {
    throw Error(ErrorCode::kInvalidArgument, "block_hankel: signal shorter than the requested depth");
  }
  const auto cols = len - depth + 1;
  Matrix h(q * depth, cols);
  for (Eigen::Index i = 0; i < depth; ++i) h.middleRows(i * q, q) = signal.middleCols(i, cols);
  return h;
}

bool pe_order(const Matrix& signal, Eigen::Index order, const RankTolerance& tol) {
  const Matrix h = block_hankel(signal, order);
  if (h.cols() < h.rows()) return false;
  return rank(h, tol) == h.rows();
}

double projection_residual(const Vector& window, const DataBlocks& blocks, const RankTolerance& tol) {
  if (window.size() != blocks.Phi.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "window length does not match the data blocks");
  }
  const Matrix basis = range_basis<double>(column_normalized(blocks.Phi), tol);
  return (window - basis * (basis.transpose() * window)).norm();
}

bool compatible(const Vector& window, const DataBlocks& blocks, const RankTolerance& tol) {
  const double residual = projection_residual(window, blocks, tol);
  return residual <= tol.threshold(blocks.Phi.rows(), blocks.Phi.cols(), window.norm());
}

}  // namespace uio
