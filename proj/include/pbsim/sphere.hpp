#pragma once

// Generalized Poincare spheres, loop geometry and geometric-phase prediction.
//
// A sphere is fixed by an orthonormal pair of pole states. A state on it maps
// to Stokes-like coordinates through c_N = <north|psi>, c_S = <south|psi>:
//   s3 = |c_N|^2 - |c_S|^2,   s1 + i s2 = 2 conj(c_N) c_S.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <vector>

#include "pbsim/elements.hpp"
#include "pbsim/modes.hpp"

namespace pbsim {

enum class Pole { North, South };

enum class SphereType { Polarization, OamSphere, HighOrder };

struct SphereKind {
  SphereType type = SphereType::Polarization;
  int m = 0;
  int sigma = +1;

  static SphereKind polarization() { return {SphereType::Polarization, 0, +1}; }
  static SphereKind oam(int order) { return {SphereType::OamSphere, order, 0}; }
  static SphereKind high_order(int order, int spin = +1) { return {SphereType::HighOrder, order, spin}; }

  // Angular momentum that scales the phase: 1, m, or m + sigma.
  int total_angular_momentum() const {
    switch (type) {
      case SphereType::Polarization: return 1;
      case SphereType::OamSphere: return m;
      case SphereType::HighOrder: return m + sigma;
    }
    return 0;
  }

  ControlKind control_kind() const {
    switch (type) {
      case SphereType::Polarization: return ControlKind::Polarization;
      case SphereType::OamSphere: return ControlKind::OamSphere;
      case SphereType::HighOrder: return ControlKind::HighOrder;
    }
    return ControlKind::Polarization;
  }

  ModeSpace default_space() const { return pbsim::default_space(m, m / 2.0); }

  // Polarization: |R>, |L>; OamSphere: |H, m>, |H, -m>; HighOrder: |sigma, m>,
  // |-sigma, -m>.
  SinglePhotonState pole_state(ModeSpace space, Pole pole) const {
    const bool north = pole == Pole::North;
    switch (type) {
      case SphereType::Polarization:
        return SinglePhotonState::basis(space, {north ? Pol::R : Pol::L, 0});
      case SphereType::OamSphere:
        return SinglePhotonState::basis(space, {Pol::H, north ? m : -m});
      case SphereType::HighOrder:
        return SinglePhotonState::basis(space, {circular(north ? sigma : -sigma), north ? m : -m});
    }
    throw Error(ErrorCode::UnsupportedScenario, "unknown sphere");
  }

  // The state the control unit carries around a closed loop. For the
  // polarization unit these are the equatorial |H> (north-referenced) and
  // |V>; otherwise they are the poles themselves.
  SinglePhotonState cycled_state(ModeSpace space, Pole pole) const {
    if (type == SphereType::Polarization)
      return SinglePhotonState::basis(space, {pole == Pole::North ? Pol::H : Pol::V, 0});
    return pole_state(space, pole);
  }
};

struct SpherePoint {
  Eigen::Vector3d s = Eigen::Vector3d::UnitZ();
};

inline SpherePoint state_to_point(const SinglePhotonState& state, const SphereKind& sphere) {
  const cplx cn = inner(sphere.pole_state(state.space(), Pole::North), state);
  const cplx cs = inner(sphere.pole_state(state.space(), Pole::South), state);
  const double proj = std::sqrt(std::norm(cn) + std::norm(cs));
  if (proj < 1.0 - 1e-6) {
    throw Error(ErrorCode::OffSphere, "state has only " + std::to_string(proj) + " of its norm on this sphere");
  }
  const cplx t = 2.0 * std::conj(cn) * cs;
  Eigen::Vector3d s(t.real(), t.imag(), std::norm(cn) - std::norm(cs));
  return {s / s.norm()};
}

struct GeodesicLoop {
  // Closed: the first vertex is repeated at the end.
  std::vector<Eigen::Vector3d> vertices;

  GeodesicLoop reversed() const {
    return {std::vector<Eigen::Vector3d>(vertices.rbegin(), vertices.rend())};
  }
};

// Joins two loops sharing a base point.
inline GeodesicLoop concatenate(const GeodesicLoop& a, const GeodesicLoop& b) {
  if (a.vertices.empty() || b.vertices.empty() || (a.vertices.back() - b.vertices.front()).norm() > 1e-10) {
    throw Error(ErrorCode::DegenerateLoop, "loops do not share a base point");
  }
  GeodesicLoop out = a;
  out.vertices.insert(out.vertices.end(), b.vertices.begin() + 1, b.vertices.end());
  return out;
}

inline GeodesicLoop make_loop(std::vector<Eigen::Vector3d> open_vertices) {
  for (auto& v : open_vertices) v.normalize();
  if (!open_vertices.empty()) open_vertices.push_back(open_vertices.front());
  return {std::move(open_vertices)};
}

// Lune between two meridians with dihedral angle 2 theta, traversed
// N -> (lon 0) -> S -> (lon 2 theta) -> N, enclosing +4 theta.
inline GeodesicLoop control_loop(double theta, const SphereKind& /*sphere*/) {
  if (!(theta > 0.0) || !(theta < kPi / 2.0)) {
    throw Error(ErrorCode::DegenerateLoop, "control loop needs 0 < theta < pi/2");
  }
  return make_loop({Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX(), -Eigen::Vector3d::UnitZ(),
                    Eigen::Vector3d(std::cos(2 * theta), std::sin(2 * theta), 0.0)});
}

// Signed solid angle of the spherical triangle (a, b, c):
// tan(Omega/2) = a.(b x c) / (1 + a.b + b.c + c.a).
inline double triangle_solid_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  return 2.0 * std::atan2(a.dot(b.cross(c)), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
}

// Fan decomposition about the normalized vertex mean; falls back to the
// first vertex when the mean vanishes.
inline double solid_angle(const GeodesicLoop& loop) {
  const auto& v = loop.vertices;
  if (v.size() < 4) throw Error(ErrorCode::DegenerateLoop, "a loop needs at least three distinct vertices");
  if ((v.front() - v.back()).norm() > 1e-10) throw Error(ErrorCode::DegenerateLoop, "loop is not closed");
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if ((v[i] - v[i + 1]).norm() < 1e-12) throw Error(ErrorCode::DegenerateLoop, "repeated consecutive vertex");
    if (v[i].dot(v[i + 1]) < -1.0 + 1e-12) throw Error(ErrorCode::DegenerateLoop, "antipodal consecutive vertices");
  }
  Eigen::Vector3d centre = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) centre += v[i];
  if (centre.norm() < 1e-9) {
    centre = v.front();
  } else {
    centre.normalize();
  }
  double omega = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) omega += triangle_solid_angle(centre, v[i], v[i + 1]);
  return omega;
}

// +J Omega / 2 for the north-referenced loop, -J Omega / 2 for the south,
// wrapped into (-pi, pi].
inline double predicted_phase(int j, double omega, Pole pole) {
  const double phase = 0.5 * j * omega;
  return wrap_phase(pole == Pole::North ? phase : -phase);
}

// U^t along the principal branch, from the Schur form of a unitary.
class UnitaryPower {
 public:
  explicit UnitaryPower(const Eigen::MatrixXcd& u) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
    q_ = schur.matrixU();
    const auto& t = schur.matrixT();
    args_.resize(t.rows());
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      double a = std::arg(t(i, i));
      if (a < -kPi + 1e-12) a = kPi;
      args_(i) = a;
    }
  }

  Eigen::MatrixXcd operator()(double t) const {
    Eigen::VectorXcd d(args_.size());
    for (Eigen::Index i = 0; i < args_.size(); ++i) d(i) = std::polar(1.0, t * args_(i));
    return q_ * d.asDiagonal() * q_.adjoint();
  }

 private:
  Eigen::MatrixXcd q_;
  Eigen::VectorXd args_;
};

// Points visited while each element acts continuously (U^{k/steps} on the
// principal branch).
inline std::vector<SpherePoint> trajectory_trace(const SinglePhotonState& initial,
                                                 const std::vector<ModeUnitary>& elements, const SphereKind& sphere,
                                                 int steps_per_element) {
  if (steps_per_element < 1) throw Error(ErrorCode::DegenerateLoop, "steps_per_element must be >= 1");
  std::vector<SpherePoint> points{state_to_point(initial, sphere)};
  const ModeSpace space = initial.space();
  const SinglePhotonState north = sphere.pole_state(space, Pole::North);
  const SinglePhotonState south = sphere.pole_state(space, Pole::South);
  SinglePhotonState state = initial;
  for (const auto& element : elements) {
    for (const auto& pole : {north, south}) {
      const SinglePhotonState image = apply_unitary(element, pole);
      const double kept = std::sqrt(std::norm(inner(north, image)) + std::norm(inner(south, image)));
      if (kept < 1.0 - 1e-6) throw Error(ErrorCode::OffSphere, "element moves the pole states off the sphere");
    }
    const SinglePhotonState image = apply_unitary(element, state);
    if (std::abs(inner(state, image)) < 1e-9) {
      // Antipodal jump: U^t is ambiguous on the branch cut, so follow the
      // horizontal geodesic cos(pi t/2) psi + sin(pi t/2) U psi instead.
      for (int k = 1; k < steps_per_element; ++k) {
        const double h = 0.5 * kPi * k / steps_per_element;
        points.push_back(state_to_point(state * std::cos(h) + image * std::sin(h), sphere));
      }
    } else {
      const UnitaryPower power(element.matrix);
      for (int k = 1; k < steps_per_element; ++k) {
        const double t = static_cast<double>(k) / steps_per_element;
        points.push_back(state_to_point({space, power(t) * state.amplitudes()}, sphere));
      }
    }
    state = image;
    points.push_back(state_to_point(state, sphere));
  }
  return points;
}

// Closes a traced path into a loop, dropping consecutive duplicates.
inline GeodesicLoop loop_from_trace(const std::vector<SpherePoint>& trace) {
  std::vector<Eigen::Vector3d> v;
  for (const auto& p : trace)
    if (v.empty() || (v.back() - p.s).norm() > 1e-12) v.push_back(p.s);
  if (v.size() > 1 && (v.back() - v.front()).norm() < 1e-9) v.pop_back();
  return make_loop(std::move(v));
}

}  // namespace pbsim
