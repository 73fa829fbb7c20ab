#include <gtest/gtest.h>

#include "pbsim/elements.hpp"
#include "support.hpp"

using namespace pbsim;
using pbsim::testing::angle_gap;
using pbsim::testing::deg;
using pbsim::testing::max_abs;

namespace {

const ModeSpace kSpace = default_space(2, 1.0);

SinglePhotonState ket(Pol p, int m) { return SinglePhotonState::basis(kSpace, {p, m}); }

// U = e^{i a} I for some a.
bool is_scalar(const Eigen::MatrixXcd& u, double tol = 1e-12) {
  const cplx a = u(0, 0);
  return max_abs(u - a * Eigen::MatrixXcd::Identity(u.rows(), u.cols())) < tol && std::abs(std::abs(a) - 1.0) < tol;
}

double phase_gain(const ModeUnitary& u, const SinglePhotonState& s) { return pancharatnam_phase(s, apply_unitary(u, s)); }

}  // namespace

TEST(Waveplates, StatedMatrices) {
  const ModeSpace s{0};
  const double a = 0.3;
  Eigen::Matrix2cd h;
  h << std::cos(2 * a), std::sin(2 * a), std::sin(2 * a), -std::cos(2 * a);
  EXPECT_LT(max_abs(hwp(s, a).matrix - h), 1e-15);
  Eigen::Matrix2cd q0 = Eigen::Matrix2cd::Zero();
  q0(0, 0) = 1.0;
  q0(1, 1) = cplx(0, 1);
  EXPECT_LT(max_abs(qwp(s, 0.0).matrix - q0), 1e-15);
}

TEST(Waveplates, ActOnlyOnPolarization) {
  const auto out = apply_unitary(hwp(kSpace, 0.4), ket(Pol::H, 2));
  for (int i = 0; i < kSpace.dim(); ++i) {
    if (kSpace.mode_at(i).oam != 2) {
      EXPECT_EQ(out.amplitudes()(i), cplx(0.0));
    }
  }
}

TEST(Waveplates, HwpExamples) {
  EXPECT_TRUE(equal_up_to_phase(apply_unitary(hwp(kSpace, 0.0), ket(Pol::H, 0)), ket(Pol::H, 0)));
  EXPECT_TRUE(equal_up_to_phase(apply_unitary(hwp(kSpace, kPi / 8), ket(Pol::H, 0)), ket(Pol::D, 0)));
  for (double a : {0.0, 0.2, 1.1, -2.3}) EXPECT_TRUE(is_scalar(compose({hwp(kSpace, a), hwp(kSpace, a)}).matrix));
}

TEST(Waveplates, QwpExamples) {
  const auto out = apply_unitary(qwp(kSpace, kPi / 4), ket(Pol::H, 0));
  const double r = std::abs(inner(ket(Pol::R, 0), out)), l = std::abs(inner(ket(Pol::L, 0), out));
  EXPECT_NEAR(std::max(r, l), 1.0, 1e-12);
  for (double a : {0.0, 0.4, -1.3}) {
    const ModeUnitary q = qwp(kSpace, a);
    EXPECT_TRUE(is_scalar(compose({q, q, q, q}).matrix));
    const Eigen::MatrixXcd qq = compose({q, q}).matrix;
    const Eigen::MatrixXcd h = hwp(kSpace, a).matrix;
    // qq = c h for a unit scalar c.
    const cplx c = (h.adjoint() * qq).trace() / static_cast<double>(kSpace.dim());
    EXPECT_LT(max_abs(qq - c * h), 1e-12);
    EXPECT_NEAR(std::abs(c), 1.0, 1e-12);
  }
}

TEST(DovePrism, ZeroOamIsInvariant) {
  for (double a : {0.0, 0.3, 2.0})
    for (Pol p : {Pol::H, Pol::V})
      EXPECT_LT((apply_unitary(dove_prism(kSpace, a), ket(p, 0)).amplitudes() - ket(p, 0).amplitudes()).norm(), 1e-15);
}

TEST(DovePrism, PairGivesTwiceMTheta) {
  const double t0 = 0.17, theta = 0.4;
  const ModeUnitary pair = compose({dove_prism(kSpace, t0), dove_prism(kSpace, t0 + theta)});
  const auto hp = apply_unitary(pair, ket(Pol::H, 1));
  EXPECT_LT((hp.amplitudes() - (ket(Pol::H, 1) * std::polar(1.0, 2 * theta)).amplitudes()).norm(), 1e-14);
  const auto vm = apply_unitary(pair, ket(Pol::V, -1));
  EXPECT_LT((vm.amplitudes() - (ket(Pol::V, -1) * std::polar(1.0, -2 * theta)).amplitudes()).norm(), 1e-14);
}

TEST(DovePrism, SameAnglePairIsScalar) {
  for (double a : {0.0, 0.7, -1.9}) EXPECT_TRUE(is_scalar(compose({dove_prism(kSpace, a), dove_prism(kSpace, a)}).matrix));
}

TEST(QPlate, ConvertsSpinAndShiftsOam) {
  const ModeUnitary half = q_plate(kSpace, 0.5);
  EXPECT_TRUE(equal_up_to_phase(apply_unitary(half, ket(Pol::L, 0)), ket(Pol::R, 1)));
  EXPECT_TRUE(equal_up_to_phase(apply_unitary(half, ket(Pol::R, 0)), ket(Pol::L, -1)));
  EXPECT_LT(half.unitarity_error(), 1e-12);
}

TEST(QPlate, TwiceRestoresEveryInWindowMode) {
  const ModeUnitary q = q_plate(kSpace, 1.0);
  const ModeUnitary qq = compose({q, q});
  for (int m = -kSpace.max_oam; m <= kSpace.max_oam; ++m) {
    for (Pol p : {Pol::R, Pol::L}) {
      // Overflow is flagged per (H, V) pair and propagates through the
      // intermediate mode, so every partner up to m +- 4 must fit.
      if (!kSpace.contains(m + 4) || !kSpace.contains(m - 4)) continue;
      EXPECT_LT((apply_unitary(qq, ket(p, m)).amplitudes() - ket(p, m).amplitudes()).norm(), 1e-14);
    }
  }
}

TEST(QPlate, NonHalfIntegerChargeIsRejected) {
  try {
    (void)q_plate(kSpace, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(QPlate, LeavingTheWindowIsAnError) {
  const ModeUnitary q = q_plate(kSpace, 0.5);
  try {
    (void)apply_unitary(q, ket(Pol::L, kSpace.max_oam));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationOverflow);
  }
  // The overflow flag follows the mode through a composed chain.
  const ModeUnitary chain = compose({hwp(kSpace, 0.1), q});
  EXPECT_TRUE(chain.overflow[static_cast<std::size_t>(kSpace.index(Pol::H, kSpace.max_oam))]);
  EXPECT_FALSE(chain.overflow[static_cast<std::size_t>(kSpace.index(Pol::H, 0))]);
}

TEST(QPlate, PreparationMakesVectorModes) {
  for (int m : {1, 2}) {
    const ModeSpace s = default_space(m, m / 2.0);
    const ModeUnitary prep = compose({qwp(s, kQuarterWaveAngle), q_plate(s, m / 2.0)});
    EXPECT_TRUE(equal_up_to_phase(apply_unitary(prep, SinglePhotonState::basis(s, {Pol::H, 0})),
                                  SinglePhotonState::basis(s, {Pol::R, m})));
    EXPECT_TRUE(equal_up_to_phase(apply_unitary(prep, SinglePhotonState::basis(s, {Pol::V, 0})),
                                  SinglePhotonState::basis(s, {Pol::L, -m})));
  }
}

TEST(Compose, PropagationOrderAndInverse) {
  const ModeUnitary a = hwp(kSpace, 0.2), b = dove_prism(kSpace, 0.5);
  EXPECT_LT(max_abs(compose({a}).matrix - a.matrix), 1e-15);
  EXPECT_LT(max_abs(compose({a, b}).matrix - b.matrix * a.matrix), 1e-15);
  const ModeUnitary c = compose({a, b, qwp(kSpace, 0.3)});
  EXPECT_LT(max_abs(compose({c, c.adjoint()}).matrix - Eigen::MatrixXcd::Identity(kSpace.dim(), kSpace.dim())), 1e-12);
}

TEST(Compose, RejectsEmptyAndMixedSpaces) {
  try {
    (void)compose(std::vector<ModeUnitary>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  try {
    (void)compose({hwp(kSpace, 0.0), hwp(ModeSpace{1}, 0.0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Compose, SpecsRealizeElements) {
  const std::vector<ElementSpec> specs{{ElementKind::QWP, -kPi / 4}, {ElementKind::QPlate, 0.5}, {ElementKind::DovePrism, 0.2}};
  const ModeUnitary a = compose(kSpace, specs);
  const ModeUnitary b = compose({qwp(kSpace, -kPi / 4), q_plate(kSpace, 0.5), dove_prism(kSpace, 0.2)});
  EXPECT_LT(max_abs(a.matrix - b.matrix), 1e-15);
}

TEST(Elements, UnitaryForRandomAngles) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
  for (int i = 0; i < 1000; ++i) {
    const double a = angle(rng);
    EXPECT_LT(hwp(kSpace, a).unitarity_error(), 1e-10);
    EXPECT_LT(qwp(kSpace, a).unitarity_error(), 1e-10);
    EXPECT_LT(dove_prism(kSpace, a).unitarity_error(), 1e-10);
  }
  for (double q : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) EXPECT_LT(q_plate(kSpace, q).unitarity_error(), 1e-10);
}

TEST(ControlUnit, PolarizationPhases) {
  const ModeSpace s{0};
  for (double theta : {deg(1), deg(20), deg(44)}) {
    const ModeUnitary u = control_unit(s, ControlKind::Polarization, 0.0, theta, 0);
    EXPECT_LT(angle_gap(phase_gain(u, SinglePhotonState::basis(s, {Pol::H, 0})), 2 * theta), 1e-12);
    EXPECT_LT(angle_gap(phase_gain(u, SinglePhotonState::basis(s, {Pol::V, 0})), -2 * theta), 1e-12);
  }
}

TEST(ControlUnit, HighOrderExamples) {
  const ModeSpace s = default_space(1, 0.5);
  const ModeUnitary u = control_unit(s, ControlKind::HighOrder, 0.0, kPi / 8, 1);
  EXPECT_NEAR(phase_gain(u, SinglePhotonState::basis(s, {Pol::R, 1})), kPi / 2, 1e-12);
  for (double theta : {deg(3), deg(17), deg(41)}) {
    const ModeUnitary v = control_unit(s, ControlKind::HighOrder, 0.3, theta, 1);
    EXPECT_NEAR(phase_gain(v, SinglePhotonState::basis(s, {Pol::L, 1})), 0.0, 1e-12);
  }
}

TEST(ControlUnit, OamRelativePhase) {
  const ModeSpace s = default_space(2, 1.0);
  const double theta = deg(13);
  const ModeUnitary u = control_unit(s, ControlKind::OamSphere, 0.2, theta, 2);
  const double rel = phase_gain(u, SinglePhotonState::basis(s, {Pol::H, 2})) -
                     phase_gain(u, SinglePhotonState::basis(s, {Pol::V, -2}));
  EXPECT_LT(angle_gap(rel, 4 * 2 * theta), 1e-12);
}

// Every pole returns to itself on a 1 deg grid and the relative pole phase
// follows 4 sigma theta, 4 m theta, 4 (m + sigma) theta.
TEST(ControlUnit, CyclicOnTheDegreeGrid) {
  struct Case {
    ControlKind kind;
    int m;
    Mode north, south;
    int j;
  };
  const std::vector<Case> cases{
      {ControlKind::Polarization, 0, {Pol::H, 0}, {Pol::V, 0}, 1},
      {ControlKind::OamSphere, 1, {Pol::H, 1}, {Pol::H, -1}, 1},
      {ControlKind::OamSphere, 2, {Pol::V, 2}, {Pol::V, -2}, 2},
      {ControlKind::HighOrder, 1, {Pol::R, 1}, {Pol::L, -1}, 2},
      {ControlKind::HighOrder, 2, {Pol::R, 2}, {Pol::L, -2}, 3},
      {ControlKind::HighOrder, 2, {Pol::L, 2}, {Pol::R, -2}, 1},
  };
  for (const auto& c : cases) {
    const ModeSpace s = c.kind == ControlKind::Polarization ? ModeSpace{0} : default_space(c.m, c.m / 2.0);
    const auto n = SinglePhotonState::basis(s, c.north), so = SinglePhotonState::basis(s, c.south);
    for (int d = 0; d <= 90; ++d) {
      const double theta = deg(d);
      const ModeUnitary u = control_unit(s, c.kind, 0.1, theta, c.m);
      EXPECT_NEAR(std::abs(inner(n, apply_unitary(u, n))), 1.0, 1e-10);
      EXPECT_NEAR(std::abs(inner(so, apply_unitary(u, so))), 1.0, 1e-10);
      const double rel = phase_gain(u, n) - phase_gain(u, so);
      // Polarization is referenced to its own zero, so theta0 adds to theta.
      const double expected = 4.0 * c.j * (c.kind == ControlKind::Polarization ? theta + 0.1 : theta);
      EXPECT_LT(angle_gap(rel, expected), 1e-9) << "m=" << c.m << " deg=" << d;
    }
  }
}

TEST(ControlUnit, OrderOutsideWindowIsRejected) {
  try {
    (void)control_unit(ModeSpace{1}, ControlKind::HighOrder, 0.0, 0.1, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationOverflow);
  }
}
