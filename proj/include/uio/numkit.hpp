#pragma once

// Dense real-matrix kernels shared by every module: rank decisions, null
// spaces, spectra and observer-gain synthesis.
//
// Every function is a template over the scalar type and is explicitly
// instantiated for `double` and `uio::HighPrecision` (see
// extended_precision.hpp).  All rank decisions go through RankTolerance.

#include <complex>
#include <cstdint>
#include <vector>

#include "uio/types.hpp"

namespace uio {

inline constexpr double kDefaultRelativeTolerance = 1e-9;
inline constexpr double kDefaultSchurMargin = 1e-9;

/// Singular values above `max(rows, cols) * relative * sigma_max` (floored by
/// `absolute_floor`) count towards the rank.
struct RankTolerance {
  double relative = kDefaultRelativeTolerance;
  double absolute_floor = 0.0;

  /// Effective threshold for a rows x cols matrix with largest singular
  /// value sigma_max.
  double threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max) const;
};

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  double spectral_radius = 0.0;
  bool is_schur = true;
};

struct GainOptions {
  RankTolerance tol{};
  double schur_margin = kDefaultSchurMargin;
  int max_iterations = 10000;
  double relative_change = 1e-10;
};

struct PlacementOptions {
  RankTolerance tol{};
  std::uint64_t seed = 0;
  double verify_tolerance = 1e-6;
  int attempts = 16;
};

template <typename Scalar>
int rank(const Mat<Scalar>& m, const RankTolerance& tol = {});

/// Orthonormal columns spanning ker(m); zero columns when the kernel is {0}.
template <typename Scalar>
Mat<Scalar> right_null_basis(const Mat<Scalar>& m, const RankTolerance& tol = {});

/// Orthonormal rows spanning the left null space: result * m = 0.
template <typename Scalar>
Mat<Scalar> left_null_basis(const Mat<Scalar>& m, const RankTolerance& tol = {});

/// Orthonormal columns spanning Im(m).
template <typename Scalar>
Mat<Scalar> range_basis(const Mat<Scalar>& m, const RankTolerance& tol = {});

/// Moore-Penrose left inverse. Throws kColumnRankDeficient.
template <typename Scalar>
Mat<Scalar> left_inverse(const Mat<Scalar>& m, const RankTolerance& tol = {});

/// Eigenvalues via the real Schur form. Throws kNumericalFailure when the
/// QR iteration does not converge.
template <typename Scalar>
SpectrumReport spectrum(const Mat<Scalar>& m, double schur_margin = kDefaultSchurMargin);

/// Rank of the complex matrix re + i*im, computed on its real embedding.
template <typename Scalar>
int complex_rank(const Mat<Scalar>& re, const Mat<Scalar>& im, const RankTolerance& tol = {});

/// Eigenvalues of `a` with modulus >= min_modulus at which [lambda*I - a; c]
/// loses rank (the PBH test).  Empty means every such mode is observable.
template <typename Scalar>
std::vector<std::complex<double>> pbh_hidden_modes(const Mat<Scalar>& a, const Mat<Scalar>& c,
                                                   double min_modulus, const RankTolerance& tol = {});

template <typename Scalar>
bool pbh_detectable(const Mat<Scalar>& a, const Mat<Scalar>& c, const RankTolerance& tol = {},
                    double schur_margin = kDefaultSchurMargin);

template <typename Scalar>
bool pbh_observable(const Mat<Scalar>& a, const Mat<Scalar>& c, const RankTolerance& tol = {});

/// L such that a + L c is Schur, from the Riccati difference equation of the
/// dual estimation problem with identity weights:
///   P+ = a P a' + I - a P c' (I + c P c')^-1 c P a',  L = -a P c' (I + c P c')^-1.
/// Throws kNotDetectable, or kNumericalFailure when the iteration cap is hit.
template <typename Scalar>
Mat<Scalar> stabilizing_gain(const Mat<Scalar>& a, const Mat<Scalar>& c, const GainOptions& options = {});

/// L such that spec(a + L c) equals `poles` (self-conjugate multiset).
/// Throws kInvalidArgument, kNotObservable or kPlacementFailed.
template <typename Scalar>
Mat<Scalar> place_poles(const Mat<Scalar>& a, const Mat<Scalar>& c,
                        const std::vector<std::complex<double>>& poles,
                        const PlacementOptions& options = {});

/// Largest distance between matched elements of two multisets of equal size
/// (greedy nearest matching); +inf when the sizes differ.
double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b);

/// Principal angles (radians, descending) between Im(a) and Im(b); computed
/// from sines so that tiny angles are resolved.  Returns {pi/2} when the
/// dimensions of the two subspaces differ.
template <typename Scalar>
std::vector<double> principal_angles(const Mat<Scalar>& a, const Mat<Scalar>& b,
                                     const RankTolerance& tol = {});

template <typename Scalar>
double max_abs(const Mat<Scalar>& m);

bool is_self_conjugate(const std::vector<std::complex<double>>& values, double tol = 1e-12);

}  // namespace uio
