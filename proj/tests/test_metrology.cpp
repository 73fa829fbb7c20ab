#include <gtest/gtest.h>

#include "pbsim/metrology.hpp"
#include "support.hpp"

using namespace pbsim;
using pbsim::testing::deg;

TEST(QfiNoon, ClosedForm) {
  EXPECT_EQ(qfi_noon(2, 1, 1, Parameterization::SolidAngle), 16.0);
  EXPECT_EQ(qfi_noon(1, 1, -1, Parameterization::SolidAngle), 0.0);
  EXPECT_EQ(qfi_noon(1, 2, 1, Parameterization::ControlAngle), 144.0);
  for (int n = 1; n <= 4; ++n)
    for (int m = -2; m <= 2; ++m)
      for (int s : {1, -1})
        EXPECT_EQ(qfi_noon(n, m, s, Parameterization::ControlAngle), 16.0 * qfi_noon(n, m, s, Parameterization::SolidAngle));
}

TEST(QfiNoon, MonotoneInNAndJ) {
  for (int n = 1; n < 4; ++n)
    EXPECT_LT(qfi_noon(n, 1, 1, Parameterization::SolidAngle), qfi_noon(n + 1, 1, 1, Parameterization::SolidAngle));
  EXPECT_LT(qfi_noon(2, 1, -1, Parameterization::SolidAngle), qfi_noon(2, 2, -1, Parameterization::SolidAngle));
  EXPECT_LT(qfi_noon(2, 2, -1, Parameterization::SolidAngle), qfi_noon(2, 1, 1, Parameterization::SolidAngle));
  EXPECT_LT(qfi_noon(2, 1, 1, Parameterization::SolidAngle), qfi_noon(2, 2, 1, Parameterization::SolidAngle));
}

TEST(QfiNumeric, ConstantFamilyHasNoInformation) {
  const auto fixed = all_in(SinglePhotonState::basis(ModeSpace{0}, {Pol::D, 0}), 2);
  EXPECT_NEAR(qfi_numeric([&](double) { return fixed; }, 0.4), 0.0, 1e-12);
}

TEST(QfiNumeric, SinglePhotonPhaseFamily) {
  const ModeSpace s{0};
  const auto h = SinglePhotonState::basis(s, {Pol::H, 0}), v = SinglePhotonState::basis(s, {Pol::V, 0});
  // (|H> + e^{i x}|V>)/sqrt2 has F = 1.
  auto family = [&](double x) { return make_noon_state(h, v * std::polar(1.0, x), 1); };
  EXPECT_NEAR(qfi_numeric(family, 0.3), 1.0, 1e-6);
}

TEST(QfiNumeric, NoonFamiliesMatchClosedForm) {
  for (int n = 1; n <= 3; ++n)
    for (int m = -2; m <= 2; ++m)
      for (int s : {1, -1})
        for (auto p : {Parameterization::SolidAngle, Parameterization::ControlAngle}) {
          const double analytic = qfi_noon(n, m, s, p);
          const double numeric = qfi_numeric(noon_family(n, m, s, p), 0.21);
          if (analytic == 0.0) {
            EXPECT_NEAR(numeric, 0.0, 1e-9);
          } else {
            EXPECT_NEAR(numeric / analytic, 1.0, 1e-6) << n << " " << m << " " << s;
          }
        }
}

TEST(QfiNumeric, StepBoundsAndNormalization) {
  const auto family = noon_family(1, 1, 1, Parameterization::SolidAngle);
  EXPECT_THROW((void)qfi_numeric(family, 0.1, 1e-2), Error);
  EXPECT_THROW((void)qfi_numeric(family, 0.1, 1e-8), Error);
  const auto f2 = [&](double x) { return family(x) * cplx(2.0); };
  try {
    (void)qfi_numeric(f2, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonNormalizedFamily);
  }
}

TEST(CfiBinary, CosineFringeGivesKSquared) {
  const auto p = [](double x) { return 0.5 * (1 - std::cos(8 * x)); };
  EXPECT_NEAR(cfi_binary(p, deg(10)), 64.0, 64e-6);
  for (double x : {0.05, 0.13, 0.31}) EXPECT_NEAR(cfi_binary(p, x) / 64.0, 1.0, 1e-6);
  EXPECT_EQ(cfi_binary([](double) { return 0.3; }, 0.2), 0.0);
}

TEST(CfiBinary, ExtremaAreDegenerate) {
  const auto p = [](double x) { return 0.5 * (1 - std::cos(8 * x)); };
  try {
    (void)cfi_binary(p, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateProbability);
  }
}

// Saturation: the ideal fringe's CFI equals the control-angle QFI wherever the
// probability is away from the extrema.
TEST(CfiBinary, SimulatedFringeSaturatesQfi) {
  for (auto [n, m, s] : std::vector<std::tuple<int, int, int>>{{1, 1, 1}, {2, 1, 1}, {2, 2, -1}, {2, 2, 1}}) {
    const auto fringe = ideal_fringe(n, m, s, Parameterization::ControlAngle);
    const double q = qfi_noon(n, m, s, Parameterization::ControlAngle);
    int checked = 0;
    for (int i = 0; i <= 90; ++i) {
      const double x = deg(0.5 * i);
      const double p = fringe(x);
      if (p < 0.05 || p > 0.95) continue;
      EXPECT_NEAR(cfi_binary(fringe, x) / q, 1.0, 1e-6) << n << " " << m << " " << s << " x=" << x;
      ++checked;
    }
    EXPECT_GT(checked, 10);
  }
  const auto f = ideal_fringe(2, 1, 1, Parameterization::ControlAngle);
  EXPECT_NEAR(cfi_binary(f, deg(2.0)), 256.0, 256e-6);
}

TEST(Crb, Examples) {
  EXPECT_EQ(crb(16.0, 1), 0.25);
  EXPECT_EQ(crb(1.0), 1.0);
  EXPECT_EQ(crb(16.0, 4), 0.125);
  try {
    (void)crb(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroInformation);
  }
  for (int n = 1; n <= 4; ++n)
    EXPECT_NEAR(crb(qfi_noon(n, 2, 1, Parameterization::SolidAngle)), 1.0 / (n * 3.0), 1e-15);
}

TEST(FisherReport, InvariantsHold) {
  for (auto p : {Parameterization::SolidAngle, Parameterization::ControlAngle})
    for (int n = 1; n <= 3; ++n)
      for (int m : {1, 2})
        for (int s : {1, -1}) {
          const auto r = fisher_report(n, m, s, p);
          EXPECT_GE(r.qfi, r.cfi * (1 - 1e-6));
          EXPECT_GE(r.cfi, 0.0);
          if (r.qfi > 0) {
            ASSERT_TRUE(r.crb.has_value());
            EXPECT_NEAR(*r.crb, 1.0 / std::sqrt(r.qfi), 1e-15);
            EXPECT_NEAR(r.cfi / r.qfi, 1.0, 1e-6);
          } else {
            EXPECT_FALSE(r.crb.has_value());
          }
        }
}
