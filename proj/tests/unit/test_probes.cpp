#include "phasecraft/probes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

using namespace phasecraft;

namespace {

// Reference energies solved to 40 digits with mpmath.
constexpr double kAooaMeanAtTwo = 2.2177151057570901108;
constexpr double kSoosRAtTwo = 1.3169578969248167086;  // acosh(2)

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TEST(Families, NamesAndValidation) {
  EXPECT_EQ(family_name(NumberSpec{2}), "NOON");
  EXPECT_EQ(family_name(CoherentSpec{}), "AOOA");
  EXPECT_EQ(family_name(SqueezedVacuumSpec{}), "SOOS");
  EXPECT_EQ(family_name(OneNSpec{}), "QOOQ");
  EXPECT_EQ(family_name(CustomSpec{}), "CUSTOM");
  EXPECT_THROW(validate(NumberSpec{0}), Error);
  EXPECT_THROW(validate(OneNSpec{1.5, 4}), Error);
  EXPECT_THROW(validate(OneNSpec{0.5, 1}), Error);
  EXPECT_THROW(validate(SqueezedVacuumSpec{-0.1, 0.0}), Error);
}

TEST(EnergyConstraint, CoherentAtTwo) {
  const auto spec = std::get<CoherentSpec>(solve_energy_constraint(CoherentSpec{}, 2.0));
  EXPECT_NEAR(std::norm(spec.alpha), kAooaMeanAtTwo, 1e-10);
  EXPECT_NEAR(make_probe(spec).n_av(), 2.0, 1e-10);
}

TEST(EnergyConstraint, SqueezedAtTwo) {
  const auto spec = std::get<SqueezedVacuumSpec>(solve_energy_constraint(SqueezedVacuumSpec{}, 2.0));
  EXPECT_NEAR(spec.r, kSoosRAtTwo, 1e-10);
  const auto probe = make_probe(spec);
  EXPECT_NEAR(probe.p0(), 0.5, 1e-10);
  EXPECT_NEAR(probe.n_av(), 2.0, 1e-10);
}

TEST(EnergyConstraint, SuperpositionWeight) {
  const auto spec = std::get<OneNSpec>(solve_energy_constraint(OneNSpec{1.0, 8}, 2.0));
  EXPECT_NEAR(spec.q, 6.0 / 7.0, 1e-15);
  EXPECT_NEAR(make_probe(spec).n_av(), 2.0, 1e-14);
}

TEST(EnergyConstraint, InfeasibleTargets) {
  EXPECT_EQ(error_of([] { solve_energy_constraint(NumberSpec{}, 2.5); }), "infeasible energy");
  EXPECT_EQ(error_of([] { solve_energy_constraint(OneNSpec{1.0, 8}, 0.5); }), "infeasible energy");
  EXPECT_EQ(error_of([] { solve_energy_constraint(OneNSpec{1.0, 8}, 9.0); }), "infeasible energy");
  EXPECT_EQ(error_of([] { solve_energy_constraint(CoherentSpec{}, -1.0); }), "infeasible energy");
}

TEST(EnergyConstraint, NumberStateSelectsN) {
  EXPECT_EQ(std::get<NumberSpec>(solve_energy_constraint(NumberSpec{}, 3.0)).n, 3);
}

TEST(Probe, MaterializedStateIsNormalized) {
  for (const ProbeSpec& spec : {ProbeSpec{NumberSpec{3}}, ProbeSpec{CoherentSpec{cplx{1.0, 0.5}}},
                                ProbeSpec{SqueezedVacuumSpec{0.6, 0.3}}, ProbeSpec{OneNSpec{0.4, 5}}}) {
    const auto probe = make_probe(spec);
    EXPECT_NEAR(probe.materialize().squared_norm(), 1.0, 1e-11) << family_name(spec);
  }
}

TEST(Probe, EnergyIsComponentMeanOverOnePlusP0) {
  const auto probe = make_probe(CoherentSpec{cplx{1.2, 0.0}});
  EXPECT_NEAR(probe.n_av(), 1.44 / (1.0 + std::exp(-1.44)), 1e-11);
}

TEST(Parse, CanonicalForms) {
  const auto noon = parse_probe_request("noon:N=4");
  EXPECT_TRUE(noon.explicit_parameters);
  EXPECT_EQ(noon.label(), "NOON(N=4)");
  EXPECT_EQ(std::get<NumberSpec>(noon.resolve()).n, 4);

  const auto aooa = parse_probe_request("aooa:nav=2");
  EXPECT_FALSE(aooa.explicit_parameters);
  EXPECT_NEAR(std::norm(std::get<CoherentSpec>(aooa.resolve()).alpha), kAooaMeanAtTwo, 1e-10);

  const auto soos = parse_probe_request("soos:r=0.5,theta=0.1");
  EXPECT_DOUBLE_EQ(std::get<SqueezedVacuumSpec>(soos.resolve()).theta, 0.1);

  const auto qooq = parse_probe_request("qooq:N=8");
  EXPECT_EQ(qooq.label(), "QOOQ(N=8)");
  EXPECT_NEAR(std::get<OneNSpec>(qooq.resolve(2.0)).q, 6.0 / 7.0, 1e-15);
  EXPECT_NEAR(std::get<OneNSpec>(parse_probe_request("qooq:N=8,q=0.25").resolve()).q, 0.25, 0.0);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_probe_request("laser"), Error);
  EXPECT_THROW(parse_probe_request("noon:M=3"), Error);
  EXPECT_THROW(parse_probe_request("qooq:nav=2"), Error);
  EXPECT_THROW(parse_probe_request("noon:N=2.5"), Error);
  EXPECT_THROW(parse_probe_request("aooa:alpha=abc"), Error);
  EXPECT_THROW(parse_probe_request("noon:N=2,nav=2"), Error);
  EXPECT_THROW(parse_probe_request("aooa").resolve(), Error);
}

TEST(Parse, CustomFile) {
  const std::string path = ::testing::TempDir() + "custom_amps.json";
  {
    std::ofstream out(path);
    out << "[[0, 0], [1, 0], [0, 1]]";
  }
  const auto req = parse_probe_request("custom:file=" + path);
  const auto probe = make_probe(req.resolve());
  EXPECT_NEAR(probe.component().probability(1), 0.5, 1e-15);
  EXPECT_NEAR(probe.component().probability(2), 0.5, 1e-15);
  EXPECT_NEAR(probe.n_av(), 1.5, 1e-15);
  std::remove(path.c_str());
  EXPECT_THROW(parse_probe_request("custom:file=/nonexistent/amps.json"), Error);
}

}  // namespace
