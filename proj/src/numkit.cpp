#include "uio/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "uio/extended_precision.hpp"

namespace uio {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kColumnRankDeficient: return "ColumnRankDeficient";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kNotDetectable: return "NotDetectable";
    case ErrorCode::kNotObservable: return "NotObservable";
    case ErrorCode::kPlacementFailed: return "PlacementFailed";
    case ErrorCode::kNoUio: return "NoUio";
    case ErrorCode::kMissingDisturbanceRecord: return "MissingDisturbanceRecord";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(NoUioCause cause) {
  switch (cause) {
    case NoUioCause::kNone: return "None";
    case NoUioCause::kVfRankDeficient: return "VfRankDeficient";
    case NoUioCause::kNotDetectable: return "NotDetectable";
    case NoUioCause::kInsufficientExcitation: return "InsufficientExcitation";
  }
  return "Unknown";
}

double RankTolerance::threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max) const {
  const double dim = static_cast<double>(std::max(rows, cols));
  return std::max(dim * relative * sigma_max, absolute_floor);
}

namespace {

template <typename Scalar>
struct Svd {
  Mat<Scalar> u;
  Vec<Scalar> sigma;
  Mat<Scalar> v;
  int rank = 0;
};

// Full SVD of a nonempty matrix with the rank decided by `tol`.
template <typename Scalar>
Svd<Scalar> full_svd(const Mat<Scalar>& m, const RankTolerance& tol) {
  Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Svd<Scalar> out{svd.matrixU(), svd.singularValues(), svd.matrixV(), 0};
  const double sigma_max = out.sigma.size() > 0 ? to_double(out.sigma(0)) : 0.0;
  const double thr = tol.threshold(m.rows(), m.cols(), sigma_max);
  for (Eigen::Index i = 0; i < out.sigma.size(); ++i) {
    if (to_double(out.sigma(i)) > thr) ++out.rank;
  }
  return out;
}

template <typename Scalar>
struct ComplexValue {
  Scalar re;
  Scalar im;
};

template <typename Scalar>
std::vector<ComplexValue<Scalar>> schur_eigenvalues(const Mat<Scalar>& m) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = m.rows();
  std::vector<ComplexValue<Scalar>> out;
  if (n == 0) return out;
  Eigen::RealSchur<Mat<Scalar>> schur(m, /*computeU=*/false);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalFailure, "real Schur iteration did not converge");
  }
  const Mat<Scalar>& t = schur.matrixT();
  out.reserve(static_cast<std::size_t>(n));
  Eigen::Index i = 0;
  while (i < n) {
    if (i == n - 1 || t(i + 1, i) == Scalar(0)) {
      out.push_back({t(i, i), Scalar(0)});
      ++i;
      continue;
    }
    const Scalar a = t(i, i), b = t(i, i + 1), c = t(i + 1, i), d = t(i + 1, i + 1);
    const Scalar mean = (a + d) / 2;
    const Scalar half = (a - d) / 2;
    const Scalar disc = half * half + b * c;
    if (disc >= Scalar(0)) {
      const Scalar s = sqrt(disc);
      out.push_back({mean + s, Scalar(0)});
      out.push_back({mean - s, Scalar(0)});
    } else {
      const Scalar s = sqrt(-disc);
      out.push_back({mean, s});
      out.push_back({mean, -s});
    }
    i += 2;
  }
  return out;
}

template <typename Scalar>
Mat<Scalar> stack_rows(const Mat<Scalar>& top, const Mat<Scalar>& bottom) {
  Mat<Scalar> out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

// Monic characteristic polynomial coefficients [1, c1, ..., cn] of a
// self-conjugate pole set.
template <typename Scalar>
std::vector<Scalar> poly_from_roots(const std::vector<std::complex<double>>& poles) {
  std::vector<Scalar> coeffs{Scalar(1)};
  auto multiply = [&coeffs](const std::vector<Scalar>& factor) {
    std::vector<Scalar> next(coeffs.size() + factor.size() - 1, Scalar(0));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      for (std::size_t j = 0; j < factor.size(); ++j) next[i + j] += coeffs[i] * factor[j];
    }
    coeffs = std::move(next);
  };
  for (const auto& p : poles) {
    if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) {
      multiply({Scalar(1), -Scalar(p.real())});
    } else if (p.imag() > 0) {
      const Scalar re(p.real());
      const Scalar im(p.imag());
      multiply({Scalar(1), Scalar(-2) * re, re * re + im * im});
    }
  }
  return coeffs;
}

// Observer gain for a single output row c: spec(a + L c) = roots of coeffs.
template <typename Scalar>
Mat<Scalar> ackermann_gain(const Mat<Scalar>& a, const Mat<Scalar>& c, const std::vector<Scalar>& coeffs) {
  const Eigen::Index n = a.rows();
  Mat<Scalar> obs(n, n);
  Mat<Scalar> row = c;
  for (Eigen::Index i = 0; i < n; ++i) {
    obs.row(i) = row;
    row = row * a;
  }
  // p(a) by Horner.
  Mat<Scalar> pa = Mat<Scalar>::Identity(n, n) * coeffs[0];
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    pa = pa * a + Mat<Scalar>::Identity(n, n) * coeffs[k];
  }
  Vec<Scalar> en = Vec<Scalar>::Zero(n);
  en(n - 1) = Scalar(1);
  const Vec<Scalar> sol = obs.fullPivLu().solve(en);
  return -(pa * sol);
}

// Real matrix whose spectrum is exactly `poles` (2x2 rotation blocks for pairs).
template <typename Scalar>
Mat<Scalar> real_block_matrix(const std::vector<std::complex<double>>& poles) {
  const Eigen::Index n = static_cast<Eigen::Index>(poles.size());
  Mat<Scalar> m = Mat<Scalar>::Zero(n, n);
  Eigen::Index i = 0;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) {
      m(i, i) = Scalar(p.real());
      ++i;
    } else if (p.imag() > 0) {
      m(i, i) = Scalar(p.real());
      m(i + 1, i + 1) = Scalar(p.real());
      m(i, i + 1) = Scalar(p.imag());
      m(i + 1, i) = -Scalar(p.imag());
      i += 2;
    }
  }
  return m;
}

std::string format_modes(const std::vector<std::complex<double>>& modes) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) os << ", ";
    os << modes[i].real();
    if (modes[i].imag() != 0.0) os << (modes[i].imag() > 0 ? "+" : "") << modes[i].imag() << "i";
    os << " (|.|=" << std::abs(modes[i]) << ")";
  }
  return os.str();
}

double uniform_pm1(std::mt19937_64& gen) {
  return 2.0 * ((static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53) - 1.0;
}

}  // namespace

template <typename Scalar>
double max_abs(const Mat<Scalar>& m) {
  if (m.size() == 0) return 0.0;
  return to_double(m.cwiseAbs().maxCoeff());
}

template <typename Scalar>
int rank(const Mat<Scalar>& m, const RankTolerance& tol) {
  if (m.size() == 0) return 0;
  return full_svd(m, tol).rank;
}

template <typename Scalar>
Mat<Scalar> right_null_basis(const Mat<Scalar>& m, const RankTolerance& tol) {
  if (m.cols() == 0) return Mat<Scalar>(0, 0);
  if (m.rows() == 0) return Mat<Scalar>::Identity(m.cols(), m.cols());
  const auto s = full_svd(m, tol);
  return s.v.rightCols(m.cols() - s.rank);
}

template <typename Scalar>
Mat<Scalar> left_null_basis(const Mat<Scalar>& m, const RankTolerance& tol) {
  if (m.rows() == 0) return Mat<Scalar>(0, 0);
  if (m.cols() == 0) return Mat<Scalar>::Identity(m.rows(), m.rows());
  const auto s = full_svd(m, tol);
  return s.u.rightCols(m.rows() - s.rank).transpose();
}

template <typename Scalar>
Mat<Scalar> range_basis(const Mat<Scalar>& m, const RankTolerance& tol) {
  if (m.size() == 0) return Mat<Scalar>(m.rows(), 0);
  const auto s = full_svd(m, tol);
  return s.u.leftCols(s.rank);
}

template <typename Scalar>
Mat<Scalar> left_inverse(const Mat<Scalar>& m, const RankTolerance& tol) {
  if (m.cols() == 0) return Mat<Scalar>(0, m.rows());
  if (m.rows() == 0) {
    throw Error(ErrorCode::kColumnRankDeficient, "left_inverse: matrix has no rows");
  }
  const auto s = full_svd(m, tol);
  if (s.rank < m.cols()) {
    std::ostringstream os;
    os << "left_inverse: rank " << s.rank << " < " << m.cols() << " columns";
    throw Error(ErrorCode::kColumnRankDeficient, os.str());
  }
  const Eigen::Index k = m.cols();
  Mat<Scalar> sigma_inv = Mat<Scalar>::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) sigma_inv(i, i) = Scalar(1) / s.sigma(i);
  return s.v * sigma_inv * s.u.leftCols(k).transpose();
}

template <typename Scalar>
SpectrumReport spectrum(const Mat<Scalar>& m, double schur_margin) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "spectrum: matrix is not square");
  }
  SpectrumReport report;
  for (const auto& ev : schur_eigenvalues(m)) {
    const std::complex<double> z(to_double(ev.re), to_double(ev.im));
    report.eigenvalues.push_back(z);
    report.spectral_radius = std::max(report.spectral_radius, std::abs(z));
  }
  report.is_schur = report.spectral_radius < 1.0 - schur_margin;
  return report;
}

template <typename Scalar>
int complex_rank(const Mat<Scalar>& re, const Mat<Scalar>& im, const RankTolerance& tol) {
  const Eigen::Index r = re.rows(), c = re.cols();
  if (re.size() == 0) return 0;
  Mat<Scalar> real(2 * r, 2 * c);
  real << re, -im, im, re;
  return rank(real, tol) / 2;
}

template <typename Scalar>
std::vector<std::complex<double>> pbh_hidden_modes(const Mat<Scalar>& a, const Mat<Scalar>& c,
                                                   double min_modulus, const RankTolerance& tol) {
  using std::sqrt;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || c.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "pbh: inconsistent dimensions");
  }
  std::vector<std::complex<double>> hidden;
  const Mat<Scalar> eye = Mat<Scalar>::Identity(n, n);
  const Mat<Scalar> zero_c = Mat<Scalar>::Zero(c.rows(), n);
  for (const auto& ev : schur_eigenvalues(a)) {
    const Scalar modulus = sqrt(ev.re * ev.re + ev.im * ev.im);
    if (to_double(modulus) < min_modulus) continue;
    const Mat<Scalar> re = stack_rows<Scalar>(eye * ev.re - a, c);
    const Mat<Scalar> im = stack_rows<Scalar>(eye * ev.im, zero_c);
    if (complex_rank(re, im, tol) < n) hidden.emplace_back(to_double(ev.re), to_double(ev.im));
  }
  return hidden;
}

template <typename Scalar>
bool pbh_detectable(const Mat<Scalar>& a, const Mat<Scalar>& c, const RankTolerance& tol, double schur_margin) {
  return pbh_hidden_modes(a, c, 1.0 - schur_margin, tol).empty();
}

template <typename Scalar>
bool pbh_observable(const Mat<Scalar>& a, const Mat<Scalar>& c, const RankTolerance& tol) {
  return pbh_hidden_modes(a, c, 0.0, tol).empty();
}

template <typename Scalar>
Mat<Scalar> stabilizing_gain(const Mat<Scalar>& a, const Mat<Scalar>& c, const GainOptions& options) {
  const Eigen::Index n = a.rows();
  const Eigen::Index q = c.rows();
  const auto hidden = pbh_hidden_modes(a, c, 1.0 - options.schur_margin, options.tol);
  if (!hidden.empty()) {
    throw Error(ErrorCode::kNotDetectable, "unobservable mode(s) outside the stability region: " +
                                               format_modes(hidden));
  }
  if (n == 0 || q == 0) return Mat<Scalar>::Zero(n, q);

  const Mat<Scalar> eye_n = Mat<Scalar>::Identity(n, n);
  const Mat<Scalar> eye_q = Mat<Scalar>::Identity(q, q);
  Mat<Scalar> p = eye_n;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Mat<Scalar> s = eye_q + c * p * c.transpose();
    const Mat<Scalar> cpa = c * p * a.transpose();
    const Mat<Scalar> next_raw = a * p * a.transpose() + eye_n - cpa.transpose() * s.llt().solve(cpa);
    const Mat<Scalar> next = (next_raw + next_raw.transpose()) / 2;
    const Scalar change = (next - p).norm();
    const Scalar scale = next.norm();
    p = next;
    if (to_double(change) <= options.relative_change * to_double(scale)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::kNumericalFailure, "Riccati iteration did not converge within " +
                                                  std::to_string(options.max_iterations) + " iterations");
  }
  const Mat<Scalar> s = eye_q + c * p * c.transpose();
  const Mat<Scalar> gain = -(s.llt().solve(c * p * a.transpose())).transpose();
  const auto closed = spectrum<Scalar>(a + gain * c, options.schur_margin);
  if (!closed.is_schur) {
    throw Error(ErrorCode::kNumericalFailure, "Riccati gain is not stabilizing (radius " +
                                                  std::to_string(closed.spectral_radius) + ")");
  }
  return gain;
}

template <typename Scalar>
Mat<Scalar> place_poles(const Mat<Scalar>& a, const Mat<Scalar>& c, const std::vector<std::complex<double>>& poles,
                        const PlacementOptions& options) {
  const Eigen::Index n = a.rows();
  const Eigen::Index q = c.rows();
  if (a.cols() != n || c.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "place_poles: inconsistent dimensions");
  }
  if (static_cast<Eigen::Index>(poles.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "place_poles: expected " + std::to_string(n) + " poles, got " +
                                                 std::to_string(poles.size()));
  }
  if (!is_self_conjugate(poles)) {
    throw Error(ErrorCode::kInvalidArgument, "place_poles: pole set is not closed under conjugation");
  }
  if (n == 0) return Mat<Scalar>::Zero(0, q);
  const auto hidden = pbh_hidden_modes(a, c, 0.0, options.tol);
  if (!hidden.empty()) {
    throw Error(ErrorCode::kNotObservable, "unobservable mode(s): " + format_modes(hidden));
  }

  auto accept = [&](const Mat<Scalar>& gain) {
    if (!gain.allFinite()) return false;
    const auto closed = spectrum<Scalar>(a + gain * c, 0.0);
    return multiset_distance(closed.eigenvalues, poles) <= options.verify_tolerance;
  };

  if (rank(c, options.tol) == n) {
    // c has full column rank: a + L c can be set to any matrix directly.
    const Mat<Scalar> gain = (real_block_matrix<Scalar>(poles) - a) * left_inverse(c, options.tol);
    if (accept(gain)) return gain;
  }

  const auto coeffs = poly_from_roots<Scalar>(poles);
  if (q == 1) {
    const Mat<Scalar> gain = ackermann_gain(a, c, coeffs);
    if (accept(gain)) return gain;
    throw Error(ErrorCode::kPlacementFailed, "place_poles: closed-loop spectrum misses the requested poles");
  }

  // Cyclic reduction: make a + L0 c cyclic, then place through one output
  // combination w' c.
  std::mt19937_64 gen(options.seed);
  const double scale = std::max(1.0, max_abs(a)) / std::max(1e-12, max_abs(c));
  for (int attempt = 0; attempt < options.attempts; ++attempt) {
    Mat<Scalar> l0 = Mat<Scalar>::Zero(n, q);
    if (attempt > 0) {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < q; ++j) l0(i, j) = Scalar(scale * uniform_pm1(gen));
    }
    Mat<Scalar> w(q, 1);
    for (Eigen::Index j = 0; j < q; ++j) w(j, 0) = Scalar(uniform_pm1(gen));
    const Mat<Scalar> a0 = a + l0 * c;
    const Mat<Scalar> crow = w.transpose() * c;
    if (!pbh_observable<Scalar>(a0, crow, options.tol)) continue;
    const Mat<Scalar> gain = l0 + ackermann_gain<Scalar>(a0, crow, coeffs) * w.transpose();
    if (accept(gain)) return gain;
  }
  throw Error(ErrorCode::kPlacementFailed,
              "place_poles: no verified placement after " + std::to_string(options.attempts) + " attempts");
}

double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& z : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(z - b[j]);
      if (dist < best) {
        best = dist;
        best_j = j;
      }
    }
    used[best_j] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

template <typename Scalar>
std::vector<double> principal_angles(const Mat<Scalar>& a, const Mat<Scalar>& b, const RankTolerance& tol) {
  using std::asin;
  const Mat<Scalar> qa = range_basis(a, tol);
  const Mat<Scalar> qb = range_basis(b, tol);
  if (qa.cols() != qb.cols()) return {std::numbers::pi / 2};
  if (qa.cols() == 0) return {};
  const Mat<Scalar> residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Mat<Scalar>> svd(residual);
  std::vector<double> angles;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    angles.push_back(std::asin(std::min(1.0, to_double(svd.singularValues()(i)))));
  }
  return angles;
}

bool is_self_conjugate(const std::vector<std::complex<double>>& values, double tol) {
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i]) continue;
    const double scale = std::max(1.0, std::abs(values[i]));
    if (std::abs(values[i].imag()) <= tol * scale) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (!used[j] && std::abs(values[j] - std::conj(values[i])) <= tol * scale) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

#define UIO_INSTANTIATE_NUMKIT(S)                                                                          \
  template double max_abs<S>(const Mat<S>&);                                                               \
  template int rank<S>(const Mat<S>&, const RankTolerance&);                                               \
  template Mat<S> right_null_basis<S>(const Mat<S>&, const RankTolerance&);                                \
  template Mat<S> left_null_basis<S>(const Mat<S>&, const RankTolerance&);                                 \
  template Mat<S> range_basis<S>(const Mat<S>&, const RankTolerance&);                                     \
  template Mat<S> left_inverse<S>(const Mat<S>&, const RankTolerance&);                                    \
  template SpectrumReport spectrum<S>(const Mat<S>&, double);                                              \
  template int complex_rank<S>(const Mat<S>&, const Mat<S>&, const RankTolerance&);                        \
  template std::vector<std::complex<double>> pbh_hidden_modes<S>(const Mat<S>&, const Mat<S>&, double,     \
                                                                 const RankTolerance&);                    \
  template bool pbh_detectable<S>(const Mat<S>&, const Mat<S>&, const RankTolerance&, double);             \
  template bool pbh_observable<S>(const Mat<S>&, const Mat<S>&, const RankTolerance&);                     \
  template Mat<S> stabilizing_gain<S>(const Mat<S>&, const Mat<S>&, const GainOptions&);                   \
  template Mat<S> place_poles<S>(const Mat<S>&, const Mat<S>&, const std::vector<std::complex<double>>&,   \
                                 const PlacementOptions&);                                                 \
  template std::vector<double> principal_angles<S>(const Mat<S>&, const Mat<S>&, const RankTolerance&);

UIO_INSTANTIATE_NUMKIT(double)
UIO_INSTANTIATE_NUMKIT(HighPrecision)

}  // namespace uio
