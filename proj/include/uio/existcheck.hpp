#pragma once

// Existence diagnostics from the model: the two rank conditions that
// characterize strong* detectability, cross-checked against the constructive
// synthesis route.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "uio/plant.hpp"
#include "uio/synth.hpp"

namespace uio {

/// rank [CE F; F 0] == rank(F) + r.
struct ConditionB {
  bool holds = false;
  int block_rank = 0;
  int rank_f = 0;
  int r = 0;
};

struct RankDropPoint {
  std::complex<double> z;
  int rank = 0;
  bool boundary = false;  // |z| within the Schur margin of 1
};

/// rank [zI-A -E; C F] == n + r for every |z| >= 1.
struct ConditionA {
  bool holds = false;
  bool normal_rank_deficient = false;  // set when the pencil never reaches n + r
  int normal_rank = 0;
  int target_rank = 0;
  /// Verified rank drops with |z| >= 1 - margin (the violations).
  std::vector<RankDropPoint> violations;
  /// Verified rank drops strictly inside the disc (allowed).
  std::vector<RankDropPoint> stable_drops;
  bool seeds_agree = true;
  std::string note;
};

ConditionB condition_b(const StateSpaceModel& model, const RankTolerance& tol = {});

/// Candidate rank-drop points are the finite generalized eigenvalues of the
/// square pencil [P(z) | R], R a seeded random (n+p) x (p-r) completion; each
/// candidate with |z| >= 1 - margin is then checked by a direct rank test of
/// P(z).  Two seeds (seed and seed+1) are run and must agree.
ConditionA condition_a(const StateSpaceModel& model, const RankTolerance& tol = {},
                       double schur_margin = kDefaultSchurMargin, std::uint64_t seed = 0);

struct ExistenceOptions {
  RankTolerance tol{};
  double schur_margin = kDefaultSchurMargin;
  std::uint64_t seed = 0;
  SynthesisOptions synthesis{};
};

struct ExistenceReport {
  ConditionA condition_a;
  ConditionB condition_b;
  bool exists = false;
  bool constructive_succeeded = false;
  std::string constructive_message;
  /// The rank verdict and the constructive route disagree.
  bool consistency_alarm = false;
};

ExistenceReport exists_uio(const StateSpaceModel& model, const ExistenceOptions& options = {});

}  // namespace uio
