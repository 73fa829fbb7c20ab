#pragma once

// Ideal optical elements as unitaries on the polarization x OAM mode space.
// Angles are radians, measured from horizontal.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "pbsim/modes.hpp"

namespace pbsim {

// Lifts a 2x2 Jones matrix to the full space (identity on OAM).
inline ModeUnitary polarization_operator(ModeSpace space, const Eigen::Matrix2cd& jones) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int m = -space.max_oam; m <= space.max_oam; ++m) {
    const int h = space.index(Pol::H, m);
    const int v = space.index(Pol::V, m);
    u(h, h) = jones(0, 0);
    u(h, v) = jones(0, 1);
    u(v, h) = jones(1, 0);
    u(v, v) = jones(1, 1);
  }
  return {space, std::move(u)};
}

inline Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// [[cos2a, sin2a], [sin2a, -cos2a]]
inline ModeUnitary hwp(ModeSpace space, double angle) {
  Eigen::Matrix2cd j;
  j << std::cos(2 * angle), std::sin(2 * angle), std::sin(2 * angle), -std::cos(2 * angle);
  return polarization_operator(space, j);
}

// R(a) diag(1, i) R(-a)
inline ModeUnitary qwp(ModeSpace space, double angle) {
  Eigen::Matrix2cd retarder = Eigen::Matrix2cd::Zero();
  retarder(0, 0) = 1.0;
  retarder(1, 1) = cplx(0.0, 1.0);
  const Eigen::Matrix2cd r = rotation(angle).cast<cplx>();
  return polarization_operator(space, r * retarder * r.transpose());
}

// Polarization-compensated Dove prism: |p, m> -> exp(-i 2 m a) |p, -m>.
inline ModeUnitary dove_prism(ModeSpace space, double angle) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (Pol p : {Pol::H, Pol::V})
    for (int m = -space.max_oam; m <= space.max_oam; ++m)
      u(space.index(p, -m), space.index(p, m)) = std::polar(1.0, -2.0 * m * angle);
  return {space, std::move(u)};
}

// Full-retardance q-plate of charge q (2q integer):
//   |L, m> -> |R, m + 2q>,   |R, m> -> |L, m - 2q>.
// Circular modes whose partner falls outside the window stay fixed and are
// flagged as overflow inputs.
inline ModeUnitary q_plate(ModeSpace space, double charge) {
  const double twice = 2.0 * charge;
  const long shift_l = std::lround(twice);
  if (std::abs(twice - static_cast<double>(shift_l)) > 1e-12) {
    throw Error(ErrorCode::DimensionMismatch, "q-plate charge must be a multiple of 1/2");
  }
  const int shift = static_cast<int>(shift_l);
  const int d = space.dim();

  auto circ = [&](Pol p, int m) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    const Eigen::Vector2cd j = pol_vector(p);
    v(space.index(Pol::H, m)) = j(0);
    v(space.index(Pol::V, m)) = j(1);
    return v;
  };

  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
  std::vector<bool> overflow(static_cast<std::size_t>(d), false);
  auto flag = [&](int m) {
    overflow[static_cast<std::size_t>(space.index(Pol::H, m))] = true;
    overflow[static_cast<std::size_t>(space.index(Pol::V, m))] = true;
  };
  for (int m = -space.max_oam; m <= space.max_oam; ++m) {
    if (space.contains(m + shift)) {
      u += circ(Pol::R, m + shift) * circ(Pol::L, m).adjoint();
    } else {
      u += circ(Pol::L, m) * circ(Pol::L, m).adjoint();
      flag(m);
    }
    if (space.contains(m - shift)) {
      u += circ(Pol::L, m - shift) * circ(Pol::R, m).adjoint();
    } else {
      u += circ(Pol::R, m) * circ(Pol::R, m).adjoint();
      flag(m);
    }
  }
  ModeUnitary out(space, std::move(u));
  out.overflow = std::move(overflow);
  return out;
}

// Product in propagation order: elements.front() acts first.
inline ModeUnitary compose(const std::vector<ModeUnitary>& elements) {
  if (elements.empty()) throw Error(ErrorCode::DimensionMismatch, "compose needs at least one element");
  ModeUnitary acc = elements.front();
  for (std::size_t i = 1; i < elements.size(); ++i) {
    const ModeUnitary& next = elements[i];
    if (!(next.space == acc.space)) throw Error(ErrorCode::DimensionMismatch, "compose across mode spaces");
    // An input leaks if the chain so far sends any weight onto a mode the
    // next element cannot map.
    for (int k = 0; k < acc.dim(); ++k) {
      if (!next.overflow[static_cast<std::size_t>(k)]) continue;
      for (int j = 0; j < acc.dim(); ++j)
        if (std::abs(acc.matrix(k, j)) > kNormTol) acc.overflow[static_cast<std::size_t>(j)] = true;
    }
    acc.matrix = next.matrix * acc.matrix;
  }
  return acc;
}

enum class ElementKind { HWP, QWP, DovePrism, QPlate };

struct ElementSpec {
  ElementKind kind = ElementKind::HWP;
  double parameter = 0.0;  // rotation angle (rad), or charge q for QPlate
};

inline ModeUnitary realize(ModeSpace space, const ElementSpec& spec) {
  switch (spec.kind) {
    case ElementKind::HWP: return hwp(space, spec.parameter);
    case ElementKind::QWP: return qwp(space, spec.parameter);
    case ElementKind::DovePrism: return dove_prism(space, spec.parameter);
    case ElementKind::QPlate: return q_plate(space, spec.parameter);
  }
  throw Error(ErrorCode::UnsupportedScenario, "unknown element kind");
}

inline ModeUnitary compose(ModeSpace space, const std::vector<ElementSpec>& specs) {
  std::vector<ModeUnitary> us;
  us.reserve(specs.size());
  for (const auto& s : specs) us.push_back(realize(space, s));
  return compose(us);
}

enum class ControlKind { Polarization, OamSphere, HighOrder };

// Quarter-wave plates of the polarization unit and of the q-plate
// preparation sit at -45 deg, which routes |H> through |L> and makes it the
// branch that gains +2 sigma theta.
inline constexpr double kQuarterWaveAngle = -kPi / 4.0;

// QWP - HWP(angle) - QWP. Equals diag(exp(i2a), -exp(-i2a)) on {H, V}.
inline ModeUnitary polarization_sandwich(ModeSpace space, double hwp_angle) {
  return compose({qwp(space, kQuarterWaveAngle), hwp(space, hwp_angle), qwp(space, kQuarterWaveAngle)});
}

// Two HWP+DP sets. Each set maps |R, m> to |L, -m> (and back), so the pair
// closes a loop on the high-order sphere; the HWP and DP angles are separate
// to allow independent SAM/OAM scans.
inline ModeUnitary hwp_dove_pair(ModeSpace space, double hwp_first, double hwp_second, double dp_first,
                                 double dp_second) {
  return compose({hwp(space, hwp_first), dove_prism(space, dp_first), hwp(space, hwp_second),
                  dove_prism(space, dp_second)});
}

// The three cyclic control units:
//   Polarization: QWP-HWP(theta0+theta)-QWP referenced to its zero-angle
//                 setting; |H> gains +2(theta0+theta), |V> the opposite.
//   OamSphere:    Dove prisms at theta0 and theta0+theta; |p, m> gains 2 m theta.
//   HighOrder:    HWP+DP sets at theta0 and theta0+theta; |R, m> gains
//                 2(m+1) theta, |L, -m> the opposite, |L, m> gains 2(m-1) theta.
inline ModeUnitary control_unit(ModeSpace space, ControlKind kind, double theta0, double theta, int m) {
  switch (kind) {
    case ControlKind::Polarization:
      return compose({polarization_sandwich(space, theta0 + theta), polarization_sandwich(space, 0.0).adjoint()});
    case ControlKind::OamSphere:
      if (!space.contains(m)) throw Error(ErrorCode::TruncationOverflow, "OAM order exceeds the truncation window");
      return compose({dove_prism(space, theta0), dove_prism(space, theta0 + theta)});
    case ControlKind::HighOrder:
      if (!space.contains(m)) throw Error(ErrorCode::TruncationOverflow, "OAM order exceeds the truncation window");
      return hwp_dove_pair(space, theta0, theta0 + theta, theta0, theta0 + theta);
  }
  throw Error(ErrorCode::UnsupportedScenario, "unknown control unit");
}

}  // namespace pbsim
