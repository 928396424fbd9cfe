#include "uio/synth.hpp"

#include <algorithm>
#include <sstream>

#include "uio/extended_precision.hpp"

namespace uio {

template <typename Scalar>
Mat<Scalar> BasicKernelRep<Scalar>::psi() const {
  Mat<Scalar> out(rows(), V_p.cols() + V_f.cols() + W_p.cols() + W_f.cols() + R_p.cols() + R_f.cols());
  out << V_p, V_f, W_p, W_f, R_p, R_f;
  return out;
}

template <typename Scalar>
BasicKernelRep<Scalar> BasicKernelRep<Scalar>::from_psi(const Mat<Scalar>& psi, const Dims& dims) {
  const auto n = dims.n, m = dims.m, p = dims.p;
  if (psi.cols() != 2 * (n + m + p)) {
    throw Error(ErrorCode::kDimensionMismatch, "kernel representation has " + std::to_string(psi.cols()) +
                                                   " columns, expected " + std::to_string(2 * (n + m + p)));
  }
  BasicKernelRep rep;
  Eigen::Index c = 0;
  auto take = [&](Eigen::Index w) {
    Mat<Scalar> block = psi.middleCols(c, w);
    c += w;
    return block;
  };
  rep.V_p = take(n);
  rep.V_f = take(n);
  rep.W_p = take(m);
  rep.W_f = take(m);
  rep.R_p = take(p);
  rep.R_f = take(p);
  return rep;
}

double AcceptorReport::worst() const { return std::max({acc1, acc2, acc3}); }

std::string AcceptorReport::first_failure() const {
  std::ostringstream os;
  os.precision(12);
  if (!(acc1 < tol)) {
    os << "acc1 residual " << acc1 << " >= " << tol;
  } else if (!(acc2 < tol)) {
    os << "acc2 residual " << acc2 << " >= " << tol;
  } else if (!(acc3 < tol)) {
    os << "acc3 residual " << acc3 << " >= " << tol;
  }
  return os.str();
}

template <typename Scalar>
Mat<Scalar> reduced_row_echelon(const Mat<Scalar>& m, const RankTolerance& tol) {
  using std::abs;
  Mat<Scalar> a = m;
  const double thr = tol.threshold(a.rows(), a.cols(), max_abs(a));
  Eigen::Index lead = 0;
  for (Eigen::Index col = 0; col < a.cols() && lead < a.rows(); ++col) {
    Eigen::Index pivot = lead;
    for (Eigen::Index i = lead + 1; i < a.rows(); ++i) {
      if (abs(a(i, col)) > abs(a(pivot, col))) pivot = i;
    }
    if (to_double(abs(a(pivot, col))) <= thr) continue;
    a.row(lead).swap(a.row(pivot));
    a.row(lead) /= a(lead, col);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != lead) a.row(i) -= a(i, col) * a.row(lead);
    }
    a(lead, col) = Scalar(1);
    ++lead;
  }
  return a;
}

template <typename Scalar>
BasicKernelRep<Scalar> kernel_representation(const Mat<Scalar>& g, const Dims& dims, const SynthesisOptions& options) {
  const auto width = 2 * (dims.n + dims.m + dims.p);
  if (g.rows() != width) {
    throw Error(ErrorCode::kDimensionMismatch,
                "subspace basis has " + std::to_string(g.rows()) + " rows, expected " + std::to_string(width));
  }
  Mat<Scalar> psi = left_null_basis(g, options.tol);
  if (psi.rows() == 0) psi.resize(0, width);
  if (options.basis == BasisStyle::kReducedEchelon && psi.rows() > 0) {
    psi = reduced_row_echelon(psi, options.tol);
  }
  return BasicKernelRep<Scalar>::from_psi(psi, dims);
}

template <typename Scalar>
BasicDesign<Scalar> synthesize(const BasicKernelRep<Scalar>& ker, const SynthesisOptions& options) {
  const auto n = ker.V_f.cols();
  const auto k = ker.rows();

  const int rank_vf = rank(ker.V_f, options.tol);
  if (rank_vf < n) {
    std::ostringstream os;
    os << "no UIO: V_f has rank " << rank_vf << " < n = " << n << " (kernel has " << k << " rows)";
    throw Error(NoUioCause::kVfRankDeficient, os.str());
  }

  BasicDesign<Scalar> design;
  auto& dg = design.diagnostics;
  dg.Omega_bar = left_inverse(ker.V_f, options.tol);
  dg.Delta_f = left_null_basis(ker.V_f, options.tol);
  if (dg.Delta_f.rows() == 0) dg.Delta_f.resize(0, k);
  dg.A_bar = dg.Omega_bar * ker.V_p;
  dg.C_bar = dg.Delta_f * ker.V_p;

  const auto hidden = pbh_hidden_modes(dg.A_bar, dg.C_bar, 1.0 - options.schur_margin, options.tol);
  if (!hidden.empty()) {
    std::ostringstream os;
    os.precision(12);
    os << "no UIO: (A_bar, C_bar) is not detectable; unobservable eigenvalue(s)";
    for (const auto& z : hidden) os << " " << z.real() << (z.imag() >= 0 ? "+" : "") << z.imag() << "i (|.|=" << std::abs(z) << ")";
    throw Error(NoUioCause::kNotDetectable, os.str());
  }

  if (options.gain == GainMethod::kPlace) {
    // A_uio = -(A_bar + L C_bar), so the closed loop is placed at -poles.
    std::vector<std::complex<double>> negated;
    negated.reserve(options.poles.size());
    for (const auto& z : options.poles) negated.push_back(-z);
    PlacementOptions po;
    po.tol = options.tol;
    po.seed = options.seed;
    dg.L = place_poles(dg.A_bar, dg.C_bar, negated, po);
  } else {
    GainOptions go;
    go.tol = options.tol;
    go.schur_margin = options.schur_margin;
    go.max_iterations = options.riccati_max_iterations;
    dg.L = stabilizing_gain(dg.A_bar, dg.C_bar, go);
  }

  dg.Omega = dg.Omega_bar + dg.L * dg.Delta_f;
  dg.A_star = -(dg.Omega * ker.V_p);
  dg.S3 = -(dg.Omega * ker.W_p);
  dg.S4 = -(dg.Omega * ker.W_f);
  dg.S5 = -(dg.Omega * ker.R_p);
  dg.S6 = -(dg.Omega * ker.R_f);

  auto& uio = design.uio;
  uio.A_uio = dg.A_star;
  uio.D_u = dg.S4;
  uio.B_u = dg.S3 + dg.A_star * dg.S4;
  uio.D_y = dg.S6;
  uio.B_y = dg.S5 + dg.A_star * dg.S6;

  dg.spectrum = spectrum(uio.A_uio, options.schur_margin);
  dg.residuals["omega_vf_identity"] = max_abs<Scalar>(dg.Omega * ker.V_f - Mat<Scalar>::Identity(n, n));
  dg.residuals["astar_identity"] = max_abs<Scalar>(dg.A_star + dg.A_bar + dg.L * dg.C_bar);
  dg.residuals["spectral_radius"] = dg.spectrum.spectral_radius;
  dg.residuals["kernel_rows"] = static_cast<double>(k);
  if (!dg.spectrum.is_schur) {
    throw Error(ErrorCode::kNumericalFailure, "synthesized A_uio is not Schur (radius " +
                                                  std::to_string(dg.spectrum.spectral_radius) + ")");
  }
  return design;
}

Design design_from_data(const DataBlocks& blocks, const SynthesisOptions& options) {
  const auto excitation = surrogate_excitation(blocks, options.tol);
  if (!excitation.full_row_rank()) {
    throw Error(NoUioCause::kInsufficientExcitation,
                "no UIO from these data: rank(X_p; U_p; U_f) = " + std::to_string(excitation.rank) + " < " +
                    std::to_string(excitation.target) + ", the data cannot span the plant's window subspace");
  }
  const Dims dims{blocks.n(), blocks.m(), blocks.p(), std::nullopt};
  return synthesize(kernel_representation<double>(column_normalized(blocks.Phi), dims, options), options);
}

template <typename Scalar>
BasicDesign<Scalar> design_from_model(const BasicStateSpaceModel<Scalar>& model, const SynthesisOptions& options) {
  require_valid(model.template cast<double>(), options.tol);
  const Dims dims{model.n(), model.m(), model.p(), model.r()};
  return synthesize(kernel_representation<Scalar>(consistency_matrix(model), dims, options), options);
}

template <typename Scalar>
AcceptorReport verify_acceptor(const BasicStateSpaceModel<Scalar>& model, const BasicUioRealization<Scalar>& uio,
                               double tol) {
  const auto n = model.n(), m = model.m(), p = model.p(), r = model.r();
  auto shape_ok = [](const Mat<Scalar>& a, Eigen::Index rows, Eigen::Index cols) {
    return a.rows() == rows && a.cols() == cols;
  };
  if (!shape_ok(uio.A_uio, n, n) || !shape_ok(uio.B_u, n, m) || !shape_ok(uio.B_y, n, p) ||
      !shape_ok(uio.D_u, n, m) || !shape_ok(uio.D_y, n, p)) {
    throw Error(ErrorCode::kDimensionMismatch, "observer dimensions do not match the plant");
  }
  Mat<Scalar> gain(n, 2 * p);
  gain << -uio.D_y, uio.A_uio * uio.D_y - uio.B_y;

  Mat<Scalar> block(2 * p, 2 * r);
  block << model.C * model.E, model.F, model.F, Mat<Scalar>::Zero(p, r);
  Mat<Scalar> target1(n, 2 * r);
  target1 << -model.E, Mat<Scalar>::Zero(n, r);

  Mat<Scalar> cac(2 * p, n);
  cac << model.C * model.A, model.C;

  Mat<Scalar> lhs3(2 * n, m);
  lhs3 << uio.B_u, uio.D_u;
  Mat<Scalar> mix(2 * n, n + p);
  mix << Mat<Scalar>::Identity(n, n) - uio.D_y * model.C, -uio.B_y, Mat<Scalar>::Zero(n, n), -uio.D_y;
  Mat<Scalar> bd(n + p, m);
  bd << model.B, model.D;

  AcceptorReport report;
  report.tol = tol;
  report.acc1 = max_abs<Scalar>(gain * block - target1);
  report.acc2 = max_abs<Scalar>(uio.A_uio - model.A - gain * cac);
  report.acc3 = max_abs<Scalar>(lhs3 - mix * bd);
  return report;
}

template <typename Scalar>
UioReport verify_uio(const BasicStateSpaceModel<Scalar>& model, const BasicUioRealization<Scalar>& uio, double tol,
                     double schur_margin) {
  UioReport report;
  report.acceptor = verify_acceptor(model, uio, tol);
  report.spectrum = spectrum(uio.A_uio, schur_margin);
  report.is_uio = report.acceptor.passed() && report.spectrum.is_schur;
  if (!report.acceptor.passed()) {
    report.failure = report.acceptor.first_failure();
  } else if (!report.spectrum.is_schur) {
    std::ostringstream os;
    os.precision(12);
    os << "A_uio is not Schur (spectral radius " << report.spectrum.spectral_radius << ")";
    report.failure = os.str();
  }
  return report;
}

#define UIO_INSTANTIATE_SYNTH(S)                                                                              \
  template struct BasicKernelRep<S>;                                                                          \
  template Mat<S> reduced_row_echelon<S>(const Mat<S>&, const RankTolerance&);                                \
  template BasicKernelRep<S> kernel_representation<S>(const Mat<S>&, const Dims&, const SynthesisOptions&);   \
  template BasicDesign<S> synthesize<S>(const BasicKernelRep<S>&, const SynthesisOptions&);                   \
  template BasicDesign<S> design_from_model<S>(const BasicStateSpaceModel<S>&, const SynthesisOptions&);      \
  template AcceptorReport verify_acceptor<S>(const BasicStateSpaceModel<S>&, const BasicUioRealization<S>&,   \
                                             double);                                                         \
  template UioReport verify_uio<S>(const BasicStateSpaceModel<S>&, const BasicUioRealization<S>&, double, double);

UIO_INSTANTIATE_SYNTH(double)
UIO_INSTANTIATE_SYNTH(HighPrecision)

}  // namespace uio
