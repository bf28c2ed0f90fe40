#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace phasecraft;

namespace {

TEST(Oracle, SinglePhotonLosslessFringe) {
  const auto probe = make_probe(NumberSpec{1});
  for (double phi : {0.3, 0.7, 2.0}) {
    const auto pmf = oracle::full_mzi_pmf(probe, phi, 1.0);
    EXPECT_NEAR(pmf(1, 0), (1.0 - std::cos(phi)) / 2.0, 1e-14);
    EXPECT_NEAR(pmf(0, 1), (1.0 + std::cos(phi)) / 2.0, 1e-14);
  }
}

TEST(Oracle, TwoPhotonsUnderLossMatchClosedForm) {
  const auto probe = make_probe(NumberSpec{2});
  const auto brute = oracle::full_mzi_pmf(probe, 0.7, 0.8);
  const auto closed = photon_counting_pmf(probe, 0.7, 0.8);
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b) EXPECT_NEAR(brute(a, b), closed(a, b), 1e-9);
  EXPECT_NEAR(brute.total(), 1.0, 1e-13);
}

TEST(Oracle, ParityAtZeroPhase) {
  const auto probe = make_probe(NumberSpec{3});
  EXPECT_NEAR(oracle::parity_from_pmf(oracle::full_mzi_pmf(probe, 0.0, 0.9)), parity_expectation(probe, 0.0, 0.9),
              1e-12);
}

TEST(Oracle, ScaleLimit) {
  try {
    oracle::full_mzi_pmf(make_probe(NumberSpec{9}), 0.1, 0.9);
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "oracle scale exceeded");
  }
  EXPECT_THROW(oracle::OracleConfig({3, 1e-9}).validate(), Error);
}

TEST(FiniteDifference, AgreesWithAnalyticFisher) {
  for (const ProbeSpec& spec : {ProbeSpec{NumberSpec{2}}, ProbeSpec{OneNSpec{0.5, 3}}, ProbeSpec{CoherentSpec{cplx{1.3, 0.0}}}}) {
    const auto probe = make_probe(spec);
    for (double t : {0.8, 1.0})
      for (double phi : {0.4, 1.1, 2.6})
        EXPECT_NEAR(oracle::finite_difference_fi(probe, phi, t) / classical_fi(probe, phi, t), 1.0, 1e-5);
  }
}

TEST(FiniteDifference, NoonLossless) {
  for (int n : {2, 4}) EXPECT_NEAR(oracle::finite_difference_fi(make_probe(NumberSpec{n}), 0.9, 1.0), n * n, 1e-4);
}

TEST(FiniteDifference, TotalLoss) {
  EXPECT_NEAR(oracle::finite_difference_fi(make_probe(NumberSpec{3}), 0.9, 0.0), 0.0, 1e-10);
}

}  // namespace
