#include "phasecraft/interferometer.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace phasecraft;

namespace {

constexpr double kPi = std::numbers::pi;

// NOON N=2 at T=0.9, phi=1: (1 - mu^2)/mu'^2 with mu = R^2 + T^2 cos 2 phi,
// evaluated to 40 digits.
constexpr double kNoonTwoParityAtT09 = 0.41154651182382669421;

PathSymmetricProbe at_energy(const ProbeSpec& family, double nav) {
  return make_probe(solve_energy_constraint(family, nav));
}

std::vector<PathSymmetricProbe> families_at_two() {
  return {make_probe(NumberSpec{2}), at_energy(CoherentSpec{}, 2.0), at_energy(SqueezedVacuumSpec{}, 2.0),
          at_energy(OneNSpec{1.0, 8}, 2.0), at_energy(OneNSpec{1.0, 100}, 2.0)};
}

TEST(PhiGrid, CellCentredPoints) {
  const PhiGrid g{0.0, 2.0 * kPi, 4};
  const auto v = g.values();
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(v[0], kPi / 4.0, 1e-15);
  EXPECT_NEAR(v[3], 7.0 * kPi / 4.0, 1e-15);
  EXPECT_TRUE(g.periodic());
  EXPECT_FALSE((PhiGrid{0.0, 1.0, 10}).periodic());
  EXPECT_THROW((PhiGrid{1.0, 0.0, 10}).values(), Error);
  EXPECT_THROW((PhiGrid{0.0, 1.0, 1}).values(), Error);
}

TEST(Parity, LosslessReductionPerTerm) {
  for (const auto& probe : families_at_two())
    for (double phi : {0.1, 0.9, 2.3, 4.0})
      EXPECT_NEAR(parity_expectation(probe, phi, 1.0), parity_expectation_lossless(probe, phi), 1e-15);
}

TEST(Parity, FrozenNoonUnderLoss) {
  EXPECT_NEAR(parity_sensitivity(make_probe(NumberSpec{2}), 1.0, 0.9), kNoonTwoParityAtT09, 1e-13);
}

TEST(Parity, NoonReachesHeisenbergEverywhere) {
  for (int n : {1, 2, 5})
    for (double phi : {0.05, 0.7, 1.9, 3.3, 5.9})
      EXPECT_NEAR(parity_sensitivity(make_probe(NumberSpec{n}), phi, 1.0) * n * n, 1.0, 1e-10);
}

TEST(Parity, DivergesAtZeroUnderLoss) {
  EXPECT_TRUE(std::isinf(parity_sensitivity(at_energy(CoherentSpec{}, 2.0), 0.0, 0.9)));
}

TEST(Parity, SecondOrderLimitAtZeroWithoutLoss) {
  for (const auto& probe : families_at_two())
    EXPECT_NEAR(parity_sensitivity(probe, 0.0, 1.0) * qfi_closed_form(probe), 1.0, 1e-9);
}

TEST(Parity, ApproachesQcrbNearZero) {
  for (const auto& probe : {make_probe(NumberSpec{2}), at_energy(CoherentSpec{}, 2.0), at_energy(OneNSpec{1.0, 8}, 2.0)})
    EXPECT_NEAR(parity_sensitivity(probe, 1e-5, 1.0) * qfi_closed_form(probe), 1.0, 1e-7);
}

TEST(Parity, SmallPhaseErrorIsQuadratic) {
  const auto probe = at_energy(OneNSpec{1.0, 8}, 2.0);
  const double fq = qfi_closed_form(probe);
  const double coarse = parity_sensitivity(probe, 2e-4, 1.0) * fq - 1.0;
  const double fine = parity_sensitivity(probe, 1e-4, 1.0) * fq - 1.0;
  EXPECT_GT(coarse, 0.0);
  EXPECT_NEAR(coarse / fine, 4.0, 1e-3);
}

TEST(Parity, ExpectationMatchesOracleAtZero) {
  const auto probe = make_probe(OneNSpec{0.5, 3});
  const auto pmf = oracle::full_mzi_pmf(probe, 0.0, 0.85);
  EXPECT_NEAR(oracle::parity_from_pmf(pmf), parity_expectation(probe, 0.0, 0.85), 1e-12);
}

TEST(Counting, SinglePhotonFringe) {
  const auto probe = make_probe(NumberSpec{1});
  for (double phi : {0.3, 1.1, 2.5}) {
    const auto pmf = photon_counting_pmf(probe, phi, 1.0);
    EXPECT_NEAR(pmf(1, 0), (1.0 - std::cos(phi)) / 2.0, 1e-15);
    EXPECT_NEAR(pmf(0, 1), (1.0 + std::cos(phi)) / 2.0, 1e-15);
  }
}

TEST(Counting, LosslessReductionPerTerm) {
  for (const auto& probe : families_at_two()) {
    const auto lossy = photon_counting_pmf(probe, 0.8, 1.0);
    const auto lossless = photon_counting_pmf_lossless(probe, 0.8);
    for (int a = 0; a <= lossy.n_max(); ++a)
      for (int b = 0; a + b <= lossy.n_max(); ++b) EXPECT_NEAR(lossy(a, b), lossless(a, b), 1e-15);
  }
}

TEST(Counting, NormalizedWithinDeficit) {
  for (const auto& probe : families_at_two()) {
    for (double t : {0.8, 0.9, 1.0}) {
      for (double phi : {0.2, 1.7}) {
        const auto pmf = photon_counting_pmf(probe, phi, t);
        EXPECT_LT(std::abs(pmf.deficit()), 1e-9);
        EXPECT_NEAR(pmf.total() + pmf.deficit(), 1.0, 1e-15);
      }
    }
  }
}

TEST(Counting, MatchesFullSimulationForBothGenerators) {
  for (const auto& probe : {make_probe(NumberSpec{2}), make_probe(OneNSpec{0.5, 3}), make_probe(NumberSpec{4})}) {
    for (double t : {0.7, 0.95}) {
      const auto closed = photon_counting_pmf(probe, 0.7, t);
      for (auto gen : {PhaseGenerator::kTwoArmSymmetric, PhaseGenerator::kSingleArm}) {
        const auto brute = oracle::full_mzi_pmf(probe, 0.7, t, {}, gen);
        for (int a = 0; a <= closed.n_max(); ++a)
          for (int b = 0; a + b <= closed.n_max(); ++b) EXPECT_NEAR(closed(a, b), brute(a, b), 1e-10);
      }
    }
  }
}

TEST(FisherInformation, NoonLosslessIsNSquared) {
  for (int n : {1, 2, 3, 6})
    for (double phi : {0.2, 1.0, kPi / (2.0 * n), 3.0}) EXPECT_NEAR(classical_fi(make_probe(NumberSpec{n}), phi, 1.0), n * n, 1e-10);
}

TEST(FisherInformation, NoonUnderLossIsTnNSquared) {
  for (int n : {2, 5}) EXPECT_NEAR(classical_fi(make_probe(NumberSpec{n}), 0.9, 0.85), std::pow(0.85, n) * n * n, 1e-12);
}

TEST(FisherInformation, LosslessEqualsQfi) {
  for (const auto& probe : families_at_two())
    for (double phi : {0.01, 0.5, 1.0, kPi / 2.0, 2.9})
      EXPECT_NEAR(classical_fi(probe, phi, 1.0) / qfi_closed_form(probe), 1.0, 1e-8);
}

TEST(FisherInformation, MatchesFiniteDifferences) {
  const auto noon = make_probe(NumberSpec{2});
  EXPECT_NEAR(classical_fi(noon, 1.0, 0.9), 3.24, 1e-12);
  EXPECT_NEAR(oracle::finite_difference_fi(noon, 1.0, 0.9) / classical_fi(noon, 1.0, 0.9), 1.0, 1e-5);
  for (const auto& probe : families_at_two())
    for (double phi : {0.4, 1.3})
      EXPECT_NEAR(oracle::finite_difference_fi(probe, phi, 0.85) / classical_fi(probe, phi, 0.85), 1.0, 1e-5);
}

TEST(FisherInformation, NeverExceedsQfi) {
  for (const auto& probe : families_at_two()) {
    const double fq = qfi_closed_form(probe);
    for (double t : {0.5, 0.8, 0.9, 1.0})
      for (double phi : PhiGrid{0.0, 2.0 * kPi, 64}.values()) EXPECT_LE(classical_fi(probe, phi, t), fq + 1e-8);
  }
}

TEST(FisherInformation, NothingSurvivesTotalLoss) {
  EXPECT_NEAR(classical_fi(at_energy(CoherentSpec{}, 2.0), 0.5, 0.0), 0.0, 1e-15);
}

TEST(SnlRange, ConstantCurves) {
  SensitivityCurve above{{0.5, 1.5, 2.5}, {1.0, 1.0, 1.0}, "x", 0.5, false};
  EXPECT_DOUBLE_EQ(snl_beating_range(above), 0.0);
  const auto curve = sensitivity_curve(make_probe(NumberSpec{2}), Measurement::kParity, 1.0, PhiGrid{}, "NOON");
  EXPECT_NEAR(snl_beating_range(curve), 2.0 * kPi, 1e-12);
}

TEST(SnlRange, PartialInterval) {
  SensitivityCurve c{{0.0, 1.0, 2.0, 3.0}, {1.0, 0.1, 0.1, 1.0}, "x", 0.5, false};
  EXPECT_NEAR(snl_beating_range(c), 2.0, 1e-15);
}

TEST(Curves, JobCountDoesNotChangeResults) {
  const auto probe = at_energy(SqueezedVacuumSpec{}, 2.0);
  const PhiGrid grid{0.0, 2.0 * kPi, 300};
  const auto one = sensitivity_curve(probe, Measurement::kCounting, 0.9, grid, "SOOS", 1);
  const auto many = sensitivity_curve(probe, Measurement::kCounting, 0.9, grid, "SOOS", 4);
  EXPECT_EQ(one.sensitivity, many.sensitivity);
}

}  // namespace
