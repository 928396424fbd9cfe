#include "uio/simlab.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "uio/extended_precision.hpp"
#include "uio/reference_example.hpp"
#include "uio/synth.hpp"

namespace uio {
namespace {

using testing::example_model;
using testing::literal;
using testing::randn;

using HpModel = BasicStateSpaceModel<HighPrecision>;
using HpUio = BasicUioRealization<HighPrecision>;
using HpVec = Vec<HighPrecision>;
using HpMat = Mat<HighPrecision>;

SynthesisOptions place(std::initializer_list<double> poles) {
  SynthesisOptions o;
  o.gain = GainMethod::kPlace;
  for (double p : poles) o.poles.emplace_back(p, 0.0);
  return o;
}

const HpModel& hp_model() {
  static const HpModel m = example_model().cast<HighPrecision>();
  return m;
}

const HpUio& hp_uio() {
  static const HpUio u = design_from_model<HighPrecision>(hp_model(), place({0, 0, 0.5})).uio;
  return u;
}

HpVec hp_random(Eigen::Index n, std::mt19937_64& rng) { return randn(n, 1, rng).cast<HighPrecision>(); }

double hp_norm(const HpVec& v) { return to_double(v.norm()); }

const UniformSignal kInput{-4, 4};
const UniformSignal kDisturbance{-3, 3};

TEST(RunTest, ShapesAndPlantEquations) {
  std::mt19937_64 rng(1);
  const auto model = example_model();
  const auto uio = design_from_model<double>(model, place({0, 0, 0.5})).uio;
  const auto tr = run<double>(model, uio, 10, kInput, kDisturbance, randn(3, 1, rng), Vector::Zero(3), 7);
  ASSERT_EQ(tr.samples(), 11);
  EXPECT_EQ(tr.u.cols(), 11);
  EXPECT_EQ(tr.d.cols(), 11);
  for (Eigen::Index t = 0; t + 1 < tr.samples(); ++t) {
    const Vector xn = model.A * tr.x.col(t) + model.B * tr.u.col(t) + model.E * tr.d.col(t);
    EXPECT_LT((xn - tr.x.col(t + 1)).norm(), 1e-12 * (1 + xn.norm()));
    const Vector zn = uio.A_uio * tr.z.col(t) + uio.B_u * tr.u.col(t) + uio.B_y * tr.y.col(t);
    EXPECT_LT((zn - tr.z.col(t + 1)).norm(), 1e-12 * (1 + zn.norm()));
  }
  for (Eigen::Index t = 0; t < tr.samples(); ++t) {
    const Vector xh = tr.z.col(t) + uio.D_u * tr.u.col(t) + uio.D_y * tr.y.col(t);
    EXPECT_LT((xh - tr.x_hat.col(t)).norm(), 1e-12 * (1 + xh.norm()));
    EXPECT_EQ(tr.e.col(t), tr.x.col(t) - tr.x_hat.col(t));
  }
}

TEST(RunTest, RejectsBadArguments) {
  const auto model = example_model();
  const auto uio = reference::printed_uio();
  EXPECT_THROW(run<double>(model, uio, 0, kInput, kDisturbance, Vector::Zero(3), Vector::Zero(3), 0), Error);
  EXPECT_THROW(run<double>(model, uio, 5, kInput, kDisturbance, Vector::Zero(2), Vector::Zero(3), 0), Error);
  EXPECT_THROW(run<double>(model, uio, 5, ExplicitSignal{Matrix::Zero(1, 5)}, kDisturbance, Vector::Zero(3),
                           Vector::Zero(3), 0),
               Error);
}

TEST(RunTest, ZeroErrorStartStaysAtZero) {
  std::mt19937_64 rng(2);
  const HpVec x0 = hp_random(3, rng);
  SampleStream us(5, static_cast<std::uint32_t>(Stream::kInput));
  SampleStream ds(5, static_cast<std::uint32_t>(Stream::kDisturbance));
  const HpVec u0 = uniform_vector(1, -4, 4, us).cast<HighPrecision>();
  const HpVec d0 = uniform_vector(1, -3, 3, ds).cast<HighPrecision>();
  const HpVec z0 = matching_initial_state<HighPrecision>(hp_model(), hp_uio(), x0, u0, d0);
  const auto tr = run<HighPrecision>(hp_model(), hp_uio(), 30, kInput, kDisturbance, x0, z0, 5);
  for (Eigen::Index t = 0; t < tr.samples(); ++t) EXPECT_LT(hp_norm(tr.e.col(t)), 1e-30);
}

TEST(RunTest, ErrorConvergesForTheExampleObserver) {
  std::mt19937_64 rng(3);
  const auto tr = run<HighPrecision>(hp_model(), hp_uio(), 50, kInput, kDisturbance, hp_random(3, rng),
                                     HpVec::Zero(3), 11);
  const double e0 = hp_norm(tr.e.col(0)), e50 = hp_norm(tr.e.col(50));
  EXPECT_GT(e0, 0.0);
  EXPECT_LT(e50, 1e-10 * e0);
}

TEST(ErrorRecursionTest, VerifiedObserverInExtendedPrecision) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto tr = run<HighPrecision>(hp_model(), hp_uio(), 50, kInput, kDisturbance, hp_random(3, rng),
                                       hp_random(3, rng), seed);
    const auto check = check_error_recursion<HighPrecision>(tr, hp_uio().A_uio, 1e-10);
    EXPECT_TRUE(check.passed);
    EXPECT_LT(check.max_residual, 1e-30);
  }
}

TEST(ErrorRecursionTest, NonAcceptorFails) {
  std::mt19937_64 rng(5);
  auto uio = design_from_model<double>(example_model(), place({0, 0, 0.5})).uio;
  uio.B_y(0, 0) += 0.5;
  const auto tr = run<double>(example_model(), uio, 20, kInput, kDisturbance, randn(3, 1, rng), Vector::Zero(3), 3);
  EXPECT_FALSE(check_error_recursion<double>(tr, uio.A_uio, 1e-10).passed);
}

TEST(ErrorRecursionTest, ZeroRunPassesVacuously) {
  const auto model = example_model();
  const auto uio = reference::printed_uio();
  const auto tr = run<double>(model, uio, 10, ExplicitSignal{Matrix::Zero(1, 11)}, ExplicitSignal{Matrix::Zero(1, 11)},
                              Vector::Zero(3), Vector::Zero(3), 0);
  const auto check = check_error_recursion<double>(tr, uio.A_uio, 1e-10);
  EXPECT_TRUE(check.passed);
  EXPECT_EQ(check.max_residual, 0.0);
}

TEST(ErrorRecursionTest, ResidualAgreesWithADirectComputation) {
  std::mt19937_64 rng(6);
  auto uio = reference::printed_uio();
  const auto tr = run<double>(example_model(), uio, 8, kInput, kDisturbance, randn(3, 1, rng), Vector::Zero(3), 1);
  double worst = 0.0;
  for (Eigen::Index t = 0; t + 1 < tr.samples(); ++t)
    worst = std::max(worst, (tr.e.col(t + 1) - uio.A_uio * tr.e.col(t)).cwiseAbs().maxCoeff());
  EXPECT_DOUBLE_EQ(check_error_recursion<double>(tr, uio.A_uio, 1e-10).max_residual, worst);
}

TEST(DecouplingTest, ErrorTraceIgnoresTheDisturbanceRealization) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    const HpVec x0 = hp_random(3, rng), z0 = hp_random(3, rng);
    SampleStream us(100 + k, static_cast<std::uint32_t>(Stream::kInput));
    const Matrix u = realize(kInput, 1, 41, us);
    SampleStream da(200 + k, 0), db(300 + k, 0);
    const Matrix d1 = realize(kDisturbance, 1, 41, da), d2 = realize(kDisturbance, 1, 41, db);
    const auto a = run<HighPrecision>(hp_model(), hp_uio(), 40, ExplicitSignal{u}, ExplicitSignal{d1}, x0, z0, 0);
    const auto b = run<HighPrecision>(hp_model(), hp_uio(), 40, ExplicitSignal{u}, ExplicitSignal{d2}, x0, z0, 0);
    EXPECT_GT(to_double((a.x - b.x).cwiseAbs().maxCoeff()), 1e-3);
    EXPECT_LT(to_double((a.e - b.e).cwiseAbs().maxCoeff()), 1e-30);
  }
}

TEST(ConvergenceStatsTest, GeometricSequence) {
  std::vector<double> norms;
  for (int t = 0; t <= 40; ++t) norms.push_back(2.0 * std::pow(0.5, t));
  const auto stats = convergence_stats_from_norms(norms);
  ASSERT_TRUE(stats.log_decay.has_value());
  EXPECT_NEAR(*stats.log_decay, std::log(0.5), 1e-6);
  EXPECT_DOUBLE_EQ(stats.final_error_norm, norms.back());
}

TEST(ConvergenceStatsTest, GeometricTrace) {
  RunTrace tr;
  const Vector v = literal(3, 1, {1, -2, 0.5});
  tr.e.resize(3, 31);
  for (int t = 0; t <= 30; ++t) tr.e.col(t) = std::pow(0.5, t) * v;
  const auto stats = convergence_stats<double>(tr);
  ASSERT_TRUE(stats.log_decay.has_value());
  EXPECT_NEAR(*stats.log_decay, std::log(0.5), 1e-6);
}

TEST(ConvergenceStatsTest, ZeroTraceHasNoDecay) {
  const auto stats = convergence_stats_from_norms(std::vector<double>(20, 0.0));
  EXPECT_EQ(stats.final_error_norm, 0.0);
  EXPECT_FALSE(stats.log_decay.has_value());
}

TEST(ConvergenceStatsTest, TooShortThrows) { EXPECT_THROW(convergence_stats_from_norms({1.0, 0.5}), Error); }

TEST(ConvergenceStatsTest, DeadbeatObserverHitsZero) {
  std::mt19937_64 rng(8);
  const auto uio = design_from_model<HighPrecision>(hp_model(), place({0, 0, 0})).uio;
  const auto tr = run<HighPrecision>(hp_model(), uio, 20, kInput, kDisturbance, hp_random(3, rng), HpVec::Zero(3), 2);
  for (Eigen::Index t = 3; t < tr.samples(); ++t) EXPECT_LT(hp_norm(tr.e.col(t)), 1e-25);
  const auto stats = convergence_stats<HighPrecision>(tr);
  EXPECT_FALSE(stats.log_decay.has_value());
}

// ||e(t)|| <= kappa rho^t ||e(0)|| with rho = radius + margin and kappa the
// largest ||A^t|| / rho^t over the horizon, computed once.
TEST(BoundTest, GeometricEnvelopeOverManyRuns) {
  const HpMat& a = hp_uio().A_uio;
  const double rho = 0.5 + 1e-9;
  const int T = 50;
  std::vector<double> envelope(T + 1);
  HpMat power = HpMat::Identity(3, 3);
  double kappa = 0.0;
  for (int t = 0; t <= T; ++t) {
    envelope[t] = testing::norm2(power.cast<double>());
    kappa = std::max(kappa, envelope[t] / std::pow(rho, t));
    power = power * a;
  }
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto tr = run<HighPrecision>(hp_model(), hp_uio(), T, kInput, kDisturbance, hp_random(3, rng),
                                       hp_random(3, rng), seed);
    const double e0 = hp_norm(tr.e.col(0));
    for (int t = 0; t <= T; ++t)
      EXPECT_LE(hp_norm(tr.e.col(t)), kappa * std::pow(rho, t) * e0 * (1 + 1e-12)) << "seed " << seed << " t " << t;
  }
}

}  // namespace
}  // namespace uio
