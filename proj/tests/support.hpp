#pragma once

// Independent oracles for the unit tests.  Nothing here calls the numkit
// routines under test: ranks come from full-pivot LU, spectra from the complex
// Schur solver, multiset matching from brute-force permutations.

#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "uio/plant.hpp"

namespace uio::testing {

inline Matrix randn(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline int lu_rank(const Matrix& m, double relative = 1e-9) {
  if (m.size() == 0) return 0;
  Eigen::FullPivLU<Matrix> lu(m);
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  lu.setThreshold(relative * static_cast<double>(std::max(m.rows(), m.cols())));
  return static_cast<int>(lu.rank());
}

inline std::vector<std::complex<double>> eig(const Matrix& m) {
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Matrix> ces(m, false);
  const auto& v = ces.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

inline double radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& z : eig(m)) r = std::max(r, std::abs(z));
  return r;
}

/// Optimal bottleneck matching by enumerating permutations (small sets only).
inline double matched_distance(std::vector<std::complex<double>> a, const std::vector<std::complex<double>>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[idx[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

inline double max_entry(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Largest singular value via the symmetric eigen-solver of m' m.
inline double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Distance of v from the column space of g, from the normal equations.
inline double distance_to_span(const Vector& v, const Matrix& g) {
  const Matrix gram = g.transpose() * g;
  const Vector coef = gram.completeOrthogonalDecomposition().solve(g.transpose() * v);
  return (v - g * coef).norm();
}

inline Matrix literal(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> values) {
  Matrix m(rows, cols);
  auto it = values.begin();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

/// The three-state example typed in independently of the library fixture.
inline StateSpaceModel example_model() {
  StateSpaceModel m;
  m.A = literal(3, 3, {1, 1, -1, 2, 1, 1, 1, 0, -1});
  m.B = literal(3, 1, {-1, 1, 1});
  m.C = literal(2, 3, {1, 1, 0, 1, -1, 1});
  m.D = literal(2, 1, {2, 1});
  m.E = literal(3, 1, {1, 0, 1});
  m.F = literal(2, 1, {1, 1});
  return m;
}

/// Random model with [E; F] of full column rank.
inline StateSpaceModel random_model(Eigen::Index n, Eigen::Index m, Eigen::Index p, Eigen::Index r,
                                    std::mt19937_64& rng) {
  StateSpaceModel s;
  for (;;) {
    s.A = randn(n, n, rng);
    s.B = randn(n, m, rng);
    s.C = randn(p, n, rng);
    s.D = randn(p, m, rng);
    s.E = randn(n, r, rng);
    s.F = randn(p, r, rng);
    Matrix ef(n + p, r);
    ef << s.E, s.F;
    if (lu_rank(ef) == r) return s;
  }
}

}  // namespace uio::testing
