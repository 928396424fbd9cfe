#include "uio/existcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "uio/signals.hpp"

namespace uio {

namespace {

// Candidates whose modulus exceeds this are treated as infinite eigenvalues
// of the completed pencil.
constexpr double kInfiniteModulus = 1e8;

struct Pencil {
  Matrix re;
  Matrix im;
};

// P(z) = [zI - A, -E; C, F]
Pencil rosenbrock(const StateSpaceModel& model, std::complex<double> z) {
  const auto n = model.n(), p = model.p(), r = model.r();
  Pencil out{Matrix::Zero(n + p, n + r), Matrix::Zero(n + p, n + r)};
  out.re.topLeftCorner(n, n) = z.real() * Matrix::Identity(n, n) - model.A;
  out.re.topRightCorner(n, r) = -model.E;
  out.re.bottomLeftCorner(p, n) = model.C;
  out.re.bottomRightCorner(p, r) = model.F;
  out.im.topLeftCorner(n, n) = z.imag() * Matrix::Identity(n, n);
  return out;
}

int pencil_rank(const StateSpaceModel& model, std::complex<double> z, const RankTolerance& tol) {
  const auto pz = rosenbrock(model, z);
  return complex_rank(pz.re, pz.im, tol);
}

struct CandidateScan {
  std::vector<RankDropPoint> violations;
  std::vector<RankDropPoint> stable_drops;
  bool singular_pencil = false;
};

CandidateScan scan_candidates(const StateSpaceModel& model, const RankTolerance& tol, double margin,
                              std::uint64_t seed) {
  const auto n = model.n(), p = model.p(), r = model.r();
  const auto size = n + p;
  const auto target = static_cast<int>(n + r);
  SampleStream stream(seed, 7);
  Matrix completion(size, p - r);
  for (Eigen::Index j = 0; j < completion.cols(); ++j)
    for (Eigen::Index i = 0; i < size; ++i) completion(i, j) = stream.uniform(-1.0, 1.0);

  // [P(z) | R] = z N - M
  Matrix N = Matrix::Zero(size, size);
  N.topLeftCorner(n, n) = Matrix::Identity(n, n);
  Matrix M(size, size);
  M.leftCols(n + r) << model.A, model.E, -model.C, -model.F;
  M.rightCols(p - r) = -completion;

  CandidateScan scan;
  Eigen::GeneralizedEigenSolver<Matrix> ges(M, N, /*computeEigenvectors=*/false);
  if (ges.info() != Eigen::Success) throw Error(ErrorCode::kNumericalFailure, "QZ iteration failed");
  const double scale = std::max(1.0, M.norm());
  const double tiny = 1e3 * std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = 0; i < size; ++i) {
    const std::complex<double> alpha = ges.alphas()(i);
    const double beta = ges.betas()(i);
    if (std::abs(beta) <= tiny && std::abs(alpha) <= tiny * scale) {
      scan.singular_pencil = true;
      continue;
    }
    if (std::abs(alpha) > kInfiniteModulus * std::abs(beta)) continue;
    const std::complex<double> z = alpha / beta;
    const int rk = pencil_rank(model, z, tol);
    if (rk >= target) continue;
    RankDropPoint point{z, rk, std::abs(std::abs(z) - 1.0) <= margin};
    if (std::abs(z) >= 1.0 - margin) {
      scan.violations.push_back(point);
    } else {
      scan.stable_drops.push_back(point);
    }
  }
  return scan;
}

}  // namespace

ConditionB condition_b(const StateSpaceModel& model, const RankTolerance& tol) {
  require_valid(model, tol);
  const auto p = model.p(), r = model.r();
  Matrix block = Matrix::Zero(2 * p, 2 * r);
  block.topLeftCorner(p, r) = model.C * model.E;
  block.topRightCorner(p, r) = model.F;
  block.bottomLeftCorner(p, r) = model.F;
  ConditionB out;
  out.block_rank = rank(block, tol);
  out.rank_f = rank(model.F, tol);
  out.r = static_cast<int>(r);
  out.holds = out.block_rank == out.rank_f + out.r;
  return out;
}

ConditionA condition_a(const StateSpaceModel& model, const RankTolerance& tol, double schur_margin,
                       std::uint64_t seed) {
  require_valid(model, tol);
  const auto n = model.n(), p = model.p(), r = model.r();
  ConditionA out;
  out.target_rank = static_cast<int>(n + r);
  if (p < r) {
    out.note = "p < r: the pencil has fewer rows than the target rank";
    return out;
  }

  SampleStream stream(seed, 6);
  const double modulus = 1.5 + stream.uniform(0.0, 1.0);
  const double angle = stream.uniform(0.0, 2.0 * std::numbers::pi);
  out.normal_rank = pencil_rank(model, std::polar(modulus, angle), tol);
  if (out.normal_rank < out.target_rank) {
    out.normal_rank_deficient = true;
    std::ostringstream os;
    os << "NormalRankDeficient: rank P(z) = " << out.normal_rank << " < " << out.target_rank
       << " at a generic point";
    out.note = os.str();
    return out;
  }

  const auto first = scan_candidates(model, tol, schur_margin, seed);
  const auto second = scan_candidates(model, tol, schur_margin, seed + 1);
  out.seeds_agree = first.violations.empty() == second.violations.empty();
  out.violations = first.violations;
  out.stable_drops = first.stable_drops;
  if (!out.seeds_agree) {
    // Keep every verified drop; any of them is a genuine violation.
    out.violations.insert(out.violations.end(), second.violations.begin(), second.violations.end());
    out.note = "completion seeds disagree; verified drops from both are kept";
  }
  if (first.singular_pencil || second.singular_pencil) {
    out.note += out.note.empty() ? "" : "; ";
    out.note += "completed pencil numerically singular";
  }
  out.holds = out.violations.empty();
  return out;
}

ExistenceReport exists_uio(const StateSpaceModel& model, const ExistenceOptions& options) {
  ExistenceReport report;
  report.condition_a = condition_a(model, options.tol, options.schur_margin, options.seed);
  report.condition_b = condition_b(model, options.tol);
  report.exists = report.condition_a.holds && report.condition_b.holds;
  try {
    const auto design = design_from_model<double>(model, options.synthesis);
    const auto check = verify_uio<double>(model, design.uio, kDefaultAcceptorTolerance, options.schur_margin);
    report.constructive_succeeded = check.is_uio;
    report.constructive_message = check.is_uio ? "constructive design verified" : check.failure;
  } catch (const Error& e) {
    report.constructive_succeeded = false;
    report.constructive_message = e.what();
  }
  report.consistency_alarm = report.exists != report.constructive_succeeded;
  return report;
}

}  // namespace uio
