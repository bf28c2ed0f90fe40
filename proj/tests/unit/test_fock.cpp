#include "phasecraft/fock.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace phasecraft;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(Combinatorics, BinomialSmallValues) {
  EXPECT_NEAR(detail::binomial(5, 2), 10.0, 1e-12);
  EXPECT_NEAR(detail::binomial(10, 0), 1.0, 1e-12);
  EXPECT_NEAR(detail::binomial(20, 10), 184756.0, 1e-6);
}

TEST(FockVector, EmptyAmplitudesAreRejected) {
  EXPECT_THROW(FockVector(std::vector<cplx>{}), Error);
}

TEST(FockVector, NumberStateAndNorm) {
  const auto v = FockVector::number(3, 5);
  EXPECT_EQ(v.n_max(), 5);
  EXPECT_DOUBLE_EQ(v.probability(3), 1.0);
  EXPECT_DOUBLE_EQ(v.squared_norm(), 1.0);
  EXPECT_DOUBLE_EQ(v.tail_bound(), 0.0);
}

TEST(FockVector, ResizeFoldsDroppedWeightIntoTail) {
  const auto v = FockVector(std::vector<cplx>{std::sqrt(0.5), 0.0, std::sqrt(0.5)});
  const auto cut = v.resized(1);
  EXPECT_EQ(cut.n_max(), 1);
  EXPECT_NEAR(cut.tail_bound(), 0.5, 1e-15);
  EXPECT_EQ(v.resized(4).n_max(), 4);
}

TEST(FockVector, NormalizeZeroStateThrows) {
  EXPECT_THROW(FockVector(std::vector<cplx>{0.0, 0.0}).normalized(), Error);
}

TEST(Coherent, PoissonWeightsAndTailBound) {
  const double mean = 2.0;
  const int n_max = coherent_cutoff(mean, 1e-12, 512);
  const auto v = coherent_state(cplx{std::sqrt(mean), 0.0}, n_max);
  for (int n = 0; n <= 6; ++n)
    EXPECT_NEAR(v.probability(n), std::exp(-mean) * std::pow(mean, n) / std::tgamma(n + 1.0), 1e-15);
  const double actual_tail = 1.0 - v.squared_norm();
  EXPECT_LE(actual_tail, v.tail_bound() + 1e-15);
  EXPECT_LT(v.tail_bound(), 1e-12);
}

TEST(Coherent, CutoffExceedingCapThrows) {
  try {
    coherent_cutoff(400.0, 1e-12, 50);
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "truncation insufficient");
  }
}

TEST(Squeezed, ClosedFormMatchesMatrixExponential) {
  const double r = 0.5;
  const double theta = 0.7;
  const int n_max = 40;
  const auto closed = squeezed_vacuum(r, theta, n_max);
  const Eigen::MatrixXcd s = squeeze_matrix(std::polar(r, theta), n_max);
  for (int n = 0; n <= n_max; ++n) EXPECT_NEAR(std::abs(closed[n] - s(n, 0)), 0.0, 1e-12) << "n=" << n;
}

TEST(Squeezed, MeanAndMandelQ) {
  const double r = 0.8;
  const int n_max = squeezed_cutoff(r, 1e-14, 512);
  const auto v = squeezed_vacuum(r, 0.0, n_max);
  const auto mom = number_moments(v);
  EXPECT_NEAR(mom.mean, std::sinh(r) * std::sinh(r), 1e-10);
  EXPECT_NEAR(mandel_q(v), std::cosh(2.0 * r), 1e-9);
}

TEST(Squeezed, TailBoundDominatesActualTail) {
  for (double r : {0.2, 0.7, 1.3}) {
    for (int n_max : {4, 10, 30}) {
      const auto v = squeezed_vacuum(r, 0.0, n_max);
      EXPECT_LE(1.0 - v.squared_norm(), squeezed_tail_bound(r, n_max) + 1e-15) << r << " " << n_max;
    }
  }
}

TEST(Squeezed, MatrixIsUnitaryOnLowBlockAndInvertible) {
  const int n_max = 60;
  const cplx xi = std::polar(0.4, 0.3);
  const Eigen::MatrixXcd s = squeeze_matrix(xi, n_max);
  const Eigen::MatrixXcd s_inv = squeeze_matrix(-xi, n_max);
  const Eigen::MatrixXcd prod = s_inv * s;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) EXPECT_NEAR(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-9);
}

TEST(Squeezed, RotationConjugationRotatesSqueezePhase) {
  const int n_max = 30;
  const double x = 0.9;
  const cplx xi = std::polar(0.4, 0.2);
  const Eigen::MatrixXcd lhs = phase_rotation_matrix(x, n_max) * squeeze_matrix(xi, n_max) *
                               phase_rotation_matrix(-x, n_max);
  const Eigen::MatrixXcd rhs = squeeze_matrix(xi * std::polar(1.0, 2.0 * x), n_max);
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

TEST(Ladder, LoweringAndMandelQ) {
  const auto v = lowering_apply(FockVector::number(3, 4));
  EXPECT_NEAR(std::abs(v[2] - std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_EQ(v[4], cplx{});
  EXPECT_DOUBLE_EQ(mandel_q(FockVector::number(4, 4)), -1.0);
  const auto coh = coherent_state(cplx{1.5, 0.0}, coherent_cutoff(2.25, 1e-15, 512));
  EXPECT_NEAR(mandel_q(coh), 0.0, 1e-10);
}

TEST(Ladder, MandelQOfVacuumThrows) {
  try {
    mandel_q(FockVector::vacuum(3));
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "Mandel-Q undefined for zero energy");
  }
}

TEST(BeamSplitter, HongOuMandelDip) {
  TwoModeState in(2);
  in(1, 1) = 1.0;
  const auto out = beam_splitter_apply(in, 0.5);
  EXPECT_NEAR(std::abs(out(1, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(2, 0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(out(0, 2)), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(BeamSplitter, ReflectionPhasesAreInverse) {
  TwoModeState in(4);
  in(2, 1) = cplx{0.6, 0.0};
  in(0, 2) = cplx{0.0, 0.8};
  const auto there = beam_splitter_apply(in, 0.3, ReflectionPhase::kPlusI);
  EXPECT_NEAR(there.squared_norm(), 1.0, 1e-14);
  const auto back = beam_splitter_apply(there, 0.3, ReflectionPhase::kMinusI);
  EXPECT_LT((back.amps() - in.amps()).norm(), 1e-14);
}

TEST(BeamSplitter, SinglePhotonAmplitudes) {
  TwoModeState in(1);
  in(1, 0) = 1.0;
  const auto out = beam_splitter_apply(in, 0.8);
  EXPECT_NEAR(std::abs(out(1, 0) - std::sqrt(0.8)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(0, 1) - cplx{0.0, std::sqrt(0.2)}), 0.0, 1e-15);
}

TEST(PhaseRotation, SinglePhotonPhase) {
  const auto v = phase_rotation(FockVector::number(1, 1), kPi / 2.0);
  EXPECT_NEAR(std::abs(v[1] - cplx{0.0, 1.0}), 0.0, 1e-15);
}

TEST(TruncationPolicy, EnvironmentOverride) {
  ::setenv("PHASECRAFT_TAIL_TOL", "1e-9", 1);
  EXPECT_DOUBLE_EQ(TruncationPolicy::from_environment().tail_tolerance, 1e-9);
  ::unsetenv("PHASECRAFT_TAIL_TOL");
  EXPECT_DOUBLE_EQ(TruncationPolicy::from_environment().tail_tolerance, 1e-12);
}

}  // namespace
