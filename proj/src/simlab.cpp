#include "uio/simlab.hpp"

#include <cmath>

#include "uio/extended_precision.hpp"

namespace uio {

template <typename Scalar>
BasicRunTrace<Scalar> run(const BasicStateSpaceModel<Scalar>& model, const BasicUioRealization<Scalar>& uio,
                          Eigen::Index T, const SignalPolicy& input, const SignalPolicy& disturbance,
                          const Vec<Scalar>& x0, const Vec<Scalar>& z0, std::uint64_t seed) {
  const auto n = model.n(), m = model.m(), p = model.p(), r = model.r();
  if (T < 1) throw Error(ErrorCode::kInvalidArgument, "run: T must be at least 1");
  if (x0.size() != n || z0.size() != n || uio.A_uio.rows() != n || uio.B_u.cols() != m || uio.B_y.cols() != p ||
      uio.D_u.cols() != m || uio.D_y.cols() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "run: plant, observer and initial states disagree in size");
  }
  SampleStream input_stream(seed, static_cast<std::uint32_t>(Stream::kInput));
  SampleStream disturbance_stream(seed, static_cast<std::uint32_t>(Stream::kDisturbance));
  const Eigen::Index samples = T + 1;

  BasicRunTrace<Scalar> tr;
  tr.u = realize(input, m, samples, input_stream).template cast<Scalar>();
  tr.d = realize(disturbance, r, samples, disturbance_stream).template cast<Scalar>();
  tr.x.resize(n, samples);
  tr.y.resize(p, samples);
  tr.z.resize(n, samples);
  tr.x_hat.resize(n, samples);
  tr.e.resize(n, samples);

  Vec<Scalar> x = x0;
  Vec<Scalar> z = z0;
  for (Eigen::Index t = 0; t < samples; ++t) {
    const auto out = step<Scalar>(model, x, tr.u.col(t), tr.d.col(t));
    const Vec<Scalar> x_hat = z + uio.D_u * tr.u.col(t) + uio.D_y * out.y;
    tr.x.col(t) = x;
    tr.y.col(t) = out.y;
    tr.z.col(t) = z;
    tr.x_hat.col(t) = x_hat;
    tr.e.col(t) = x - x_hat;
    z = uio.A_uio * z + uio.B_u * tr.u.col(t) + uio.B_y * out.y;
    x = out.x_next;
  }
  return tr;
}

template <typename Scalar>
Vec<Scalar> matching_initial_state(const BasicStateSpaceModel<Scalar>& model,
                                   const BasicUioRealization<Scalar>& uio, const Vec<Scalar>& x0,
                                   const Vec<Scalar>& u0, const Vec<Scalar>& d0) {
  const Vec<Scalar> y0 = model.C * x0 + model.D * u0 + model.F * d0;
  return x0 - uio.D_u * u0 - uio.D_y * y0;
}

template <typename Scalar>
RecursionCheck check_error_recursion(const BasicRunTrace<Scalar>& trace, const Mat<Scalar>& a_uio, double tol) {
  RecursionCheck check;
  const auto samples = trace.e.cols();
  if (samples < 2) throw Error(ErrorCode::kInvalidArgument, "error recursion needs at least two samples");
  const double scale = 1.0 + max_abs<Scalar>(trace.e);
  for (Eigen::Index t = 0; t + 1 < samples; ++t) {
    const Vec<Scalar> diff = trace.e.col(t + 1) - a_uio * trace.e.col(t);
    check.max_residual = std::max(check.max_residual, to_double(diff.cwiseAbs().maxCoeff()));
  }
  check.passed = check.max_residual < tol * scale;
  return check;
}

ConvergenceStats convergence_stats_from_norms(const std::vector<double>& norms) {
  if (norms.size() < 3) throw Error(ErrorCode::kInvalidArgument, "convergence statistics need at least 3 samples");
  ConvergenceStats stats;
  stats.final_error_norm = norms.back();
  std::vector<double> ts, logs;
  for (std::size_t t = norms.size() / 2; t < norms.size(); ++t) {
    if (norms[t] < kNumericalZero) continue;
    ts.push_back(static_cast<double>(t));
    logs.push_back(std::log(norms[t]));
  }
  if (ts.size() < 2) return stats;
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += logs[i];
  }
  mt /= static_cast<double>(ts.size());
  ml /= static_cast<double>(ts.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (logs[i] - ml);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  stats.log_decay = num / den;
  return stats;
}

template <typename Scalar>
ConvergenceStats convergence_stats(const BasicRunTrace<Scalar>& trace) {
  std::vector<double> norms;
  norms.reserve(static_cast<std::size_t>(trace.e.cols()));
  for (Eigen::Index t = 0; t < trace.e.cols(); ++t) norms.push_back(to_double(trace.e.col(t).norm()));
  return convergence_stats_from_norms(norms);
}

#define UIO_INSTANTIATE_SIMLAB(S)                                                                              \
  template BasicRunTrace<S> run<S>(const BasicStateSpaceModel<S>&, const BasicUioRealization<S>&, Eigen::Index, \
                                   const SignalPolicy&, const SignalPolicy&, const Vec<S>&, const Vec<S>&,       \
                                   std::uint64_t);                                                             \
  template Vec<S> matching_initial_state<S>(const BasicStateSpaceModel<S>&, const BasicUioRealization<S>&,      \
                                            const Vec<S>&, const Vec<S>&, const Vec<S>&);                      \
  template RecursionCheck check_error_recursion<S>(const BasicRunTrace<S>&, const Mat<S>&, double);            \
  template ConvergenceStats convergence_stats<S>(const BasicRunTrace<S>&);

UIO_INSTANTIATE_SIMLAB(double)
UIO_INSTANTIATE_SIMLAB(HighPrecision)

}  // namespace uio
