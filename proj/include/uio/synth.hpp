#pragma once

// Observer synthesis from a kernel representation of the admissible
// two-step windows, and the acceptor/UIO verification predicates.
//
// The window coordinates are (x, x+, u, u+, y, y+).  A kernel representation
// Psi = [V_p V_f W_p W_f R_p R_f] has ker(Psi) equal to the window subspace,
// which is Im(Phi) for data and Im(consistency_matrix) for a model.  The
// observer is read off any Omega with
//   Omega [V_p V_f] = [-A* I],  A* Schur,
// parametrized as Omega = pinv(V_f) + L Delta_f with ker(Delta_f) = Im(V_f).

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uio/datalog.hpp"
#include "uio/numkit.hpp"
#include "uio/plant.hpp"

namespace uio {

inline constexpr double kDefaultAcceptorTolerance = 1e-8;

template <typename Scalar>
struct BasicKernelRep {
  Mat<Scalar> V_p, V_f, W_p, W_f, R_p, R_f;

  Eigen::Index rows() const { return V_p.rows(); }
  Mat<Scalar> psi() const;

  /// Splits a k x 2(n+m+p) matrix into its column blocks.
  static BasicKernelRep from_psi(const Mat<Scalar>& psi, const Dims& dims);
};

enum class GainMethod { kRiccati, kPlace };
enum class BasisStyle { kOrthonormal, kReducedEchelon };

struct SynthesisOptions {
  GainMethod gain = GainMethod::kRiccati;
  /// Requested spectrum of A_uio when gain == kPlace.
  std::vector<std::complex<double>> poles;
  RankTolerance tol{};
  double schur_margin = kDefaultSchurMargin;
  BasisStyle basis = BasisStyle::kOrthonormal;
  std::uint64_t seed = 0;
  int riccati_max_iterations = 10000;
};

template <typename Scalar>
struct BasicSynthesisDiagnostics {
  Mat<Scalar> Omega_bar, Delta_f, A_bar, C_bar, L, Omega, A_star, S3, S4, S5, S6;
  SpectrumReport spectrum;
  std::map<std::string, double> residuals;
};

template <typename Scalar>
struct BasicDesign {
  BasicUioRealization<Scalar> uio;
  BasicSynthesisDiagnostics<Scalar> diagnostics;
};

using KernelRep = BasicKernelRep<double>;
using SynthesisDiagnostics = BasicSynthesisDiagnostics<double>;
using Design = BasicDesign<double>;

/// Annihilator of Im(g) partitioned into blocks; g has 2(n+m+p) rows.
template <typename Scalar>
BasicKernelRep<Scalar> kernel_representation(const Mat<Scalar>& g, const Dims& dims,
                                             const SynthesisOptions& options = {});

/// Runs the Omega construction.  Throws Error with NoUioCause kVfRankDeficient
/// or kNotDetectable (both with evidence), or the gain-synthesis errors.
template <typename Scalar>
BasicDesign<Scalar> synthesize(const BasicKernelRep<Scalar>& ker, const SynthesisOptions& options = {});

/// Data route.  Rejects data whose (X_p, U_p, U_f) stack is rank deficient
/// (NoUioCause::kInsufficientExcitation): such data cannot satisfy the data
/// assumption, so the subspace it spans is not the plant's.
Design design_from_data(const DataBlocks& blocks, const SynthesisOptions& options = {});

/// Model route: kernel of the consistency matrix, then synthesize().
template <typename Scalar>
BasicDesign<Scalar> design_from_model(const BasicStateSpaceModel<Scalar>& model,
                                      const SynthesisOptions& options = {});

struct AcceptorReport {
  double acc1 = 0.0;  // [-D_y, A_uio D_y - B_y][CE F; F 0] - [-E 0]
  double acc2 = 0.0;  // A_uio - A - [-D_y, A_uio D_y - B_y][CA; C]
  double acc3 = 0.0;  // [B_u; D_u] - [I - D_y C, -B_y; 0, -D_y][B; D]
  double tol = kDefaultAcceptorTolerance;

  bool passed() const { return acc1 < tol && acc2 < tol && acc3 < tol; }
  double worst() const;
  /// Empty when passed.
  std::string first_failure() const;
};

struct UioReport {
  AcceptorReport acceptor;
  SpectrumReport spectrum;
  bool is_uio = false;
  std::string failure;
};

template <typename Scalar>
AcceptorReport verify_acceptor(const BasicStateSpaceModel<Scalar>& model, const BasicUioRealization<Scalar>& uio,
                               double tol = kDefaultAcceptorTolerance);

template <typename Scalar>
UioReport verify_uio(const BasicStateSpaceModel<Scalar>& model, const BasicUioRealization<Scalar>& uio,
                     double tol = kDefaultAcceptorTolerance, double schur_margin = kDefaultSchurMargin);

/// Row-reduced echelon form (Gauss-Jordan, partial pivoting) of a full row
/// rank matrix.
template <typename Scalar>
Mat<Scalar> reduced_row_echelon(const Mat<Scalar>& m, const RankTolerance& tol = {});

}  // namespace uio
