#include "oracles.hpp"
#include "seqmeas/entanglement.hpp"
#include "seqmeas/measurement.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace seqmeas;
using oracle::pi;

TEST(Ranges, EnforcedAtConstruction) {
  EXPECT_THROW(KitStrength(-0.1), std::out_of_range);
  EXPECT_THROW(KitStrength(pi / 4 + 1e-6), std::out_of_range);
  EXPECT_NO_THROW(KitStrength(pi / 4));
  EXPECT_THROW(MeterBasisAngle(pi / 2 + 1e-6), std::out_of_range);
  EXPECT_THROW(MeterBasisAngle(-1e-6), std::out_of_range);
  EXPECT_DOUBLE_EQ(MeterBasisAngle{}.value(), pi / 4);
  EXPECT_THROW(KitStrength::from_knowledge(1.5), std::out_of_range);
}

TEST(MeterStates, Examples) {
  auto [a0, a1] = meter_states(KitStrength(0));
  EXPECT_EQ(a0.amplitudes(), Ket2(1, 0));
  EXPECT_EQ(a1.amplitudes(), Ket2(1, 0));
  std::tie(a0, a1) = meter_states(KitStrength(pi / 4));
  EXPECT_NEAR(a0[1].real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(a1[1].real(), -std::sqrt(0.5), 1e-15);
  std::tie(a0, a1) = meter_states(KitStrength(pi / 8));
  EXPECT_NEAR(a0[0].real(), 0.92388, 1e-5);
  EXPECT_NEAR(a0[1].real(), 0.38268, 1e-5);
}

TEST(KrausPair, ClosedForms) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u;
  for (int t = 0; t < 1000; ++t) {
    const double psi = u(g) * pi / 4, lam = u(g) * pi / 2;
    const KrausPair k = kraus_pair(MeasurementKit(KitStrength(psi), MeterBasisAngle(lam)));
    ASSERT_NEAR(k.m0(0, 0).real(), std::cos(lam - psi), 1e-14);
    ASSERT_NEAR(k.m0(1, 1).real(), std::cos(lam + psi), 1e-14);
    ASSERT_NEAR(k.m1(0, 0).real(), std::sin(psi - lam), 1e-14);
    ASSERT_NEAR(k.m1(1, 1).real(), -std::sin(psi + lam), 1e-14);
    ASSERT_EQ(k.m0(0, 1), 0.0);
    ASSERT_EQ(k.m1(1, 0), 0.0);
    const Matrix2 completeness = k.m0.adjoint() * k.m0 + k.m1.adjoint() * k.m1;
    ASSERT_LE((completeness - Matrix2::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(KrausPair, Examples) {
  const KrausPair mid = kraus_pair(MeasurementKit(KitStrength(pi / 8)));
  EXPECT_NEAR(mid.m0(0, 0).real(), 0.92388, 1e-5);
  EXPECT_NEAR(mid.m0(1, 1).real(), 0.38268, 1e-5);
  EXPECT_NEAR(mid.m1(0, 0).real(), -0.38268, 1e-5);
  EXPECT_NEAR(mid.m1(1, 1).real(), -0.92388, 1e-5);

  const KrausPair proj = kraus_pair(MeasurementKit(KitStrength(pi / 4)));
  EXPECT_NEAR(proj.m0(0, 0).real(), 1, 1e-15);
  EXPECT_NEAR(proj.m0(1, 1).real(), 0, 1e-15);
  EXPECT_NEAR(proj.m1(0, 0).real(), 0, 1e-15);
  EXPECT_NEAR(proj.m1(1, 1).real(), -1, 1e-15);

  const double lam = 0.3;
  const KrausPair none = kraus_pair(MeasurementKit(KitStrength(0), MeterBasisAngle(lam)));
  EXPECT_NEAR(none.m0(0, 0).real(), std::cos(lam), 1e-15);
  EXPECT_NEAR(none.m0(1, 1).real(), std::cos(lam), 1e-15);
  EXPECT_NEAR(std::abs(none.m1(0, 0)), std::sin(lam), 1e-15);
  EXPECT_NEAR(outcome_probability(none, 0, 0), outcome_probability(none, 0, 1), 1e-15);
}

TEST(Knowledge, MatchesOverlapOracle) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u;
  for (int t = 0; t < 1000; ++t) {
    const double psi = u(g) * pi / 4, lam = u(g) * pi / 2;
    const auto k = knowledge_of_kit(MeasurementKit(KitStrength(psi), MeterBasisAngle(lam)));
    double expected = 0;
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        const double p = oracle::p_outcome(psi, lam, i, j);
        ASSERT_NEAR(k.p(i, j), p, 1e-14);
        expected += (i == j ? p : -p);
      }
    ASSERT_NEAR(k.value, std::abs(expected) / 2, 1e-14);
    ASSERT_NEAR(k.conditional.row(0).sum(), 1, 1e-12);
    ASSERT_NEAR(k.conditional.row(1).sum(), 1, 1e-12);
  }
}

TEST(Knowledge, DiagonalKitIsSinTwoPsiAndMonotone) {
  double prev = -1;
  for (int i = 0; i <= 1000; ++i) {
    const double psi = (pi / 4) * i / 1000;
    const double k = knowledge_of_kit(MeasurementKit(KitStrength(psi))).value;
    ASSERT_NEAR(k, oracle::k_single(psi), 1e-12);
    ASSERT_GE(k, prev - 1e-15);
    prev = k;
  }
  EXPECT_NEAR(knowledge_of_kit(MeasurementKit(KitStrength(pi / 8))).value, 0.70711, 1e-5);
  EXPECT_NEAR(knowledge_of_kit(MeasurementKit(KitStrength(pi / 4))).value, 1.0, 1e-15);
}

TEST(Knowledge, PbsMislabelling) {
  const auto pbs = PbsImperfection::from_ports(0.992, 0.992);
  EXPECT_NEAR(pbs.r_h, 0.008, 1e-15);
  EXPECT_NEAR(pbs.t_v, 0.008, 1e-15);
  EXPECT_NEAR(knowledge_of_kit(MeasurementKit(KitStrength(pi / 4), MeterBasisAngle{}, pbs)).value, 0.984, 1e-12);
  for (int i = 0; i <= 50; ++i) {
    const double psi = (pi / 4) * i / 50;
    const double k = knowledge_of_kit(MeasurementKit(KitStrength(psi), MeterBasisAngle{}, pbs)).value;
    ASSERT_NEAR(k, (0.992 + 0.992 - 1) * oracle::k_single(psi), 1e-12);
  }
  // asymmetric ports: direct flip bookkeeping
  const auto skew = PbsImperfection::from_ports(0.95, 0.99);
  const double psi = 0.3;
  const auto k = knowledge_of_kit(MeasurementKit(KitStrength(psi), MeterBasisAngle{}, skew));
  const double q0 = oracle::p_outcome(psi, pi / 4, 0, 0), q1 = oracle::p_outcome(psi, pi / 4, 1, 1);
  const double p00 = 0.95 * q0 + 0.05 * (1 - q0), p11 = 0.99 * q1 + 0.01 * (1 - q1);
  EXPECT_NEAR(k.value, std::abs(p00 + p11 - 1), 1e-14);
}

TEST(Pbs, Validation) {
  EXPECT_THROW((PbsImperfection{0.9, 0.9, 0.2, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW(PbsImperfection::from_ports(1.2, 0.9), std::invalid_argument);
  EXPECT_NO_THROW((PbsImperfection{0.9, 0.8, 0.1, 0.2}.validate()));
}

TEST(ApplyKit, Examples) {
  const BranchSet mid = apply_kit(singlet_state(), MeasurementKit(KitStrength(pi / 8)));
  EXPECT_NEAR(mid.branches[0].probability, 0.5, 1e-15);
  EXPECT_NEAR(mid.branches[1].probability, 0.5, 1e-15);
  EXPECT_NEAR(concurrence(mid.non_selective), std::cos(pi / 4), 1e-12);

  const BranchSet none = apply_kit(singlet_state(), MeasurementKit(KitStrength(0)));
  EXPECT_LE((none.branches[0].state->matrix() - singlet_state().matrix()).norm(), 1e-15);
  EXPECT_LE((none.branches[1].state->matrix() - singlet_state().matrix()).norm(), 1e-15);
  EXPECT_NEAR(concurrence(none.non_selective), 1.0, 1e-12);

  const BranchSet full = apply_kit(singlet_state(), MeasurementKit(KitStrength(pi / 4)));
  Matrix4 dephased = Matrix4::Zero();
  dephased(1, 1) = dephased(2, 2) = 0.5;
  EXPECT_LE((full.non_selective.matrix() - dephased).norm(), 1e-15);
  EXPECT_NEAR(concurrence(full.non_selective), 0.0, 1e-15);
}

TEST(ApplyKit, UnreachableBranchOmitted) {
  // |00>: projective kit never reports outcome 1
  const BranchSet b = apply_kit(DensityMatrix4(PureState4::basis(0)), MeasurementKit(KitStrength(pi / 4)));
  EXPECT_TRUE(b.branches[0].reachable());
  EXPECT_FALSE(b.branches[1].reachable());
  EXPECT_LT(b.branches[1].probability, kUnreachableProbability);
}

TEST(ApplyKit, ProbabilitiesAndOffDiagonalScaling) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u;
  for (int t = 0; t < 1000; ++t) {
    const oracle::CMat4 m = oracle::random_state(g);
    const double psi = u(g) * pi / 4, lam = u(g) * pi / 2;
    const BranchSet b = apply_kit(DensityMatrix4(m), MeasurementKit(KitStrength(psi), MeterBasisAngle(lam)));
    ASSERT_NEAR(b.branches[0].probability + b.branches[1].probability, 1, 1e-12);
    // non-selective: entries coupling different B values scale by cos 2psi
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const double f = (r & 1) == (c & 1) ? 1.0 : std::cos(2 * psi);
        ASSERT_LE(std::abs(b.non_selective(r, c) - f * m(r, c)), 1e-12);
      }
  }
}

TEST(ApplyKit, SingleTradeoffOnSinglet) {
  for (int i = 0; i <= 50; ++i) {
    const double psi = (pi / 4) * i / 50;
    const double c = concurrence(apply_kit(singlet_state(), MeasurementKit(KitStrength(psi))).non_selective);
    ASSERT_NEAR(c, oracle::c_coherent(oracle::k_single(psi)), 1e-9);
  }
}

TEST(ApplyKit, TargetA) {
  const BranchSet b = apply_kit(DensityMatrix4(PureState4::basis(2)), MeasurementKit(KitStrength(pi / 4)), Qubit::A);
  EXPECT_NEAR(b.branches[1].probability, 1.0, 1e-15);
}

TEST(Waveplate, Examples) {
  auto w = waveplate_to_strength(0);
  EXPECT_NEAR(w.psi.value(), pi / 4, 1e-15);
  EXPECT_NEAR(w.k, 1, 1e-15);
  w = waveplate_to_strength(pi / 8);
  EXPECT_NEAR(w.psi.value(), 0, 1e-15);
  EXPECT_NEAR(w.k, 0, 1e-15);
  w = waveplate_to_strength(pi / 16);
  EXPECT_NEAR(w.psi.value(), pi / 8, 1e-15);
  EXPECT_NEAR(w.k, 0.70711, 1e-5);
  EXPECT_THROW(waveplate_to_strength(-0.01), std::out_of_range);
  EXPECT_THROW(waveplate_to_strength(pi / 8 + 0.01), std::out_of_range);
  EXPECT_NEAR(strength_to_waveplate(KitStrength(pi / 8)), pi / 16, 1e-15);
  const auto opt = WaveplateAngles::optimal(0.1);
  EXPECT_NEAR(opt.theta_a - opt.theta_b, pi / 4, 1e-15);
}

TEST(Waveplate, ConsistentWithKnowledge) {
  for (int i = 0; i <= 200; ++i) {
    const double tb = (pi / 8) * i / 200;
    const auto w = waveplate_to_strength(tb);
    ASSERT_NEAR(w.k, std::abs(std::cos(4 * tb)), 1e-12);
    ASSERT_NEAR(knowledge_of_kit(MeasurementKit(w.psi)).value, w.k, 1e-12);
  }
}

TEST(States, SingletEntries) {
  const DensityMatrix4 s = singlet_state();
  EXPECT_NEAR(s(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(s(2, 2).real(), 0.5, 1e-15);
  EXPECT_NEAR(s(1, 2).real(), -0.5, 1e-15);
  EXPECT_NEAR(s(2, 1).real(), -0.5, 1e-15);
  EXPECT_LE((s.matrix() - oracle::singlet()).norm(), 1e-15);
  EXPECT_NEAR(s.matrix().cwiseAbs().sum(), 2.0, 1e-15);
}

TEST(States, Werner) {
  EXPECT_LE((werner_state(1).matrix() - singlet_state().matrix()).norm(), 1e-15);
  EXPECT_LE((werner_state(0.37).matrix() - oracle::werner(0.37)).norm(), 1e-15);
  EXPECT_NEAR(concurrence(werner_state(1.0 / 3)), 0, 1e-12);
  EXPECT_NEAR(negativity(werner_state(1.0 / 3)), 0, 1e-12);
  EXPECT_NEAR(concurrence(werner_state(0.8)), 0.7, 1e-12);
  EXPECT_THROW(werner_state(1.1), std::out_of_range);
}

TEST(States, Dephase) {
  const DensityMatrix4 d = dephase(singlet_state());
  EXPECT_NEAR(std::abs(d(1, 2)), 0, 1e-15);
  EXPECT_NEAR(d(1, 1).real(), 0.5, 1e-15);
}
