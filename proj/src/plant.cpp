#include "uio/plant.hpp"

#include <sstream>

#include "uio/extended_precision.hpp"

namespace uio {

template <typename Scalar>
Mat<Scalar> BasicStateSpaceModel<Scalar>::disturbance_map() const {
  Mat<Scalar> ef(E.rows() + F.rows(), E.cols());
  ef << E, F;
  return ef;
}

template struct BasicStateSpaceModel<double>;
template struct BasicStateSpaceModel<HighPrecision>;

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

std::vector<std::string> validate(const StateSpaceModel& model, const RankTolerance& tol) {
  std::vector<std::string> violations;
  const auto n = model.A.rows();
  const auto m = model.B.cols();
  const auto p = model.C.rows();
  const auto r = model.E.cols();
  auto expect = [&](const char* label, const Matrix& mat, Eigen::Index rows, Eigen::Index cols) {
    if (mat.rows() != rows || mat.cols() != cols) {
      std::ostringstream os;
      os << kDimensionViolation << ": " << label << " is " << shape(mat) << ", expected " << rows << "x" << cols;
      violations.push_back(os.str());
    }
  };
  if (n == 0) violations.push_back(std::string(kDimensionViolation) + ": state dimension is 0");
  expect("A", model.A, n, n);
  expect("B", model.B, n, m);
  expect("C", model.C, p, n);
  expect("D", model.D, p, m);
  expect("E", model.E, n, r);
  expect("F", model.F, p, r);
  if (!violations.empty()) return violations;

  const int rank_ef = rank(model.disturbance_map(), tol);
  if (rank_ef < r) {
    std::ostringstream os;
    os << kRankViolation << ": rank([E;F]) = " << rank_ef << " < r = " << r;
    violations.push_back(os.str());
  }
  return violations;
}

void require_valid(const StateSpaceModel& model, const RankTolerance& tol) {
  const auto violations = validate(model, tol);
  if (violations.empty()) return;
  std::string msg = "invalid model";
  if (!model.name.empty()) msg += " '" + model.name + "'";
  for (const auto& v : violations) msg += "; " + v;
  throw Error(ErrorCode::kInvalidModel, msg);
}

StateSpaceModel make_model(Matrix A, Matrix B, Matrix C, Matrix D, Matrix E, Matrix F, std::string name,
                           const RankTolerance& tol) {
  StateSpaceModel model{std::move(A), std::move(B), std::move(C), std::move(D),
                        std::move(E), std::move(F), std::move(name)};
  require_valid(model, tol);
  return model;
}

StateSpaceModel reduce_disturbance(const StateSpaceModel& model, const RankTolerance& tol) {
  const Matrix ef = model.disturbance_map();
  const auto r = model.r();
  if (rank(ef, tol) == r) return model;
  const Matrix basis = range_basis(ef, tol);
  StateSpaceModel reduced = model;
  reduced.E = basis.topRows(model.n());
  reduced.F = basis.bottomRows(model.p());
  return reduced;
}

Matrix mla_ef(const StateSpaceModel& model, const RankTolerance& tol) {
  return left_null_basis(model.disturbance_map(), tol);
}

template <typename Scalar>
StepResult<Scalar> step(const BasicStateSpaceModel<Scalar>& model, const Vec<Scalar>& x, const Vec<Scalar>& u,
                        const Vec<Scalar>& d) {
  if (x.size() != model.n() || u.size() != model.m() || d.size() != model.r()) {
    std::ostringstream os;
    os << "step: expected (x,u,d) sizes (" << model.n() << "," << model.m() << "," << model.r() << "), got ("
       << x.size() << "," << u.size() << "," << d.size() << ")";
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  StepResult<Scalar> out;
  out.x_next = model.A * x + model.B * u + model.E * d;
  out.y = model.C * x + model.D * u + model.F * d;
  return out;
}

template <typename Scalar>
Mat<Scalar> consistency_matrix(const BasicStateSpaceModel<Scalar>& model) {
  const auto n = model.n(), m = model.m(), p = model.p(), r = model.r();
  const auto cols = n + 2 * m + 2 * r;
  Mat<Scalar> gamma = Mat<Scalar>::Zero(2 * (n + m + p), cols);
  // Column blocks of the generator domain.
  const Eigen::Index cx = 0, cu = n, cu1 = n + m, cd = n + 2 * m, cd1 = n + 2 * m + r;
  // Row blocks in window order (x, x+, u, u+, y, y+).
  const Eigen::Index rx = 0, rx1 = n, ru = 2 * n, ru1 = 2 * n + m, ry = 2 * n + 2 * m, ry1 = 2 * n + 2 * m + p;

  const Mat<Scalar> ca = model.C * model.A;
  const Mat<Scalar> cb = model.C * model.B;
  const Mat<Scalar> ce = model.C * model.E;

  gamma.block(rx, cx, n, n) = Mat<Scalar>::Identity(n, n);
  gamma.block(rx1, cx, n, n) = model.A;
  gamma.block(rx1, cu, n, m) = model.B;
  gamma.block(rx1, cd, n, r) = model.E;
  gamma.block(ru, cu, m, m) = Mat<Scalar>::Identity(m, m);
  gamma.block(ru1, cu1, m, m) = Mat<Scalar>::Identity(m, m);
  gamma.block(ry, cx, p, n) = model.C;
  gamma.block(ry, cu, p, m) = model.D;
  gamma.block(ry, cd, p, r) = model.F;
  gamma.block(ry1, cx, p, n) = ca;
  gamma.block(ry1, cu, p, m) = cb;
  gamma.block(ry1, cu1, p, m) = model.D;
  gamma.block(ry1, cd, p, r) = ce;
  gamma.block(ry1, cd1, p, r) = model.F;
  return gamma;
}

Vector stack_window(const Vector& x, const Vector& x_next, const Vector& u, const Vector& u_next, const Vector& y,
                    const Vector& y_next) {
  Vector w(x.size() + x_next.size() + u.size() + u_next.size() + y.size() + y_next.size());
  w << x, x_next, u, u_next, y, y_next;
  return w;
}

template StepResult<double> step<double>(const BasicStateSpaceModel<double>&, const Vec<double>&,
                                         const Vec<double>&, const Vec<double>&);
template StepResult<HighPrecision> step<HighPrecision>(const BasicStateSpaceModel<HighPrecision>&,
                                                       const Vec<HighPrecision>&, const Vec<HighPrecision>&,
                                                       const Vec<HighPrecision>&);
template Mat<double> consistency_matrix<double>(const BasicStateSpaceModel<double>&);
template Mat<HighPrecision> consistency_matrix<HighPrecision>(const BasicStateSpaceModel<HighPrecision>&);

}  // namespace uio
