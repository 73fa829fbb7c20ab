#pragma once

// Fisher information for estimating the geometric phase with N00N states of
// high-order vector modes.
//
// Two parameterizations are exposed. In the solid-angle one the relative
// phase between the poles is N J Omega, so F_Q = N^2 J^2. The control angle
// theta enters through Omega = 4 theta, which scales every Fisher
// information by 16.

#include <functional>
#include <optional>
#include <string>

#include "pbsim/fock.hpp"
#include "pbsim/harness.hpp"
#include "pbsim/sphere.hpp"

namespace pbsim {

enum class Parameterization { SolidAngle, ControlAngle };

inline std::string to_string(Parameterization p) {
  return p == Parameterization::SolidAngle ? "solid-angle" : "control-angle";
}

// Omega per unit of the chosen parameter.
inline double solid_angle_per_unit(Parameterization p) { return p == Parameterization::SolidAngle ? 1.0 : 4.0; }

inline double qfi_noon(int n_photons, int m, int sigma, Parameterization p) {
  if (n_photons < 1) throw Error(ErrorCode::ConfigError, "N must be >= 1");
  const double nj = static_cast<double>(n_photons) * (m + sigma);
  const double chain = solid_angle_per_unit(p);
  return chain * chain * nj * nj;
}

using StateFamily = std::function<FockState(double)>;

// Pure-state QFI 4 (<d psi|d psi> - |<psi|d psi>|^2) with central differences.
inline double qfi_numeric(const StateFamily& family, double at, double step = 1e-5) {
  if (!(step >= 1e-6 && step <= 1e-3)) throw Error(ErrorCode::ConfigError, "finite-difference step must be in [1e-6, 1e-3]");
  const FockState psi = family(at);
  const FockState plus = family(at + step);
  const FockState minus = family(at - step);
  for (const FockState* s : {&psi, &plus, &minus}) {
    if (std::abs(s->norm() - 1.0) > 1e-9) throw Error(ErrorCode::NonNormalizedFamily, "family member is not normalized");
  }
  if (!(*plus.basis() == *psi.basis()) || !(*minus.basis() == *psi.basis())) {
    throw Error(ErrorCode::DimensionMismatch, "family changes Fock basis");
  }
  const Eigen::VectorXcd d = (plus.amplitudes() - minus.amplitudes()) / (2.0 * step);
  const double dd = d.squaredNorm();
  const double overlap = std::norm(psi.amplitudes().dot(d));
  return std::max(0.0, 4.0 * (dd - overlap));
}

// Binary-outcome Fisher information (p')^2 / (p (1 - p)).
inline double cfi_binary(const std::function<double(double)>& p, double at, double step = 1e-5) {
  const double p0 = p(at);
  if (!(p0 > 1e-9 && p0 < 1.0 - 1e-9)) {
    throw Error(ErrorCode::DegenerateProbability, "probability " + std::to_string(p0) + " at a fringe extremum");
  }
  const double dp = (p(at + step) - p(at - step)) / (2.0 * step);
  return dp * dp / (p0 * (1.0 - p0));
}

// Standard-deviation bound 1/sqrt(n F).
inline double crb(double fisher, int n_repeats = 1) {
  if (n_repeats < 1) throw Error(ErrorCode::ConfigError, "n_repeats must be >= 1");
  if (!(fisher > 0.0)) throw Error(ErrorCode::ZeroInformation, "zero Fisher information, parameter not estimable");
  return 1.0 / std::sqrt(n_repeats * fisher);
}

// N00N state over the high-order poles |sigma, m> and |-sigma, -m>, carried
// around the HWP+DP loop. The parameter is Omega or theta per `p`.
inline StateFamily noon_family(int n_photons, int m, int sigma, Parameterization p) {
  const SphereKind sphere = SphereKind::high_order(m, sigma);
  const ModeSpace space = sphere.default_space();
  const FockState start = make_noon_state(sphere.pole_state(space, Pole::North),
                                          sphere.pole_state(space, Pole::South), n_photons);
  const double per_unit = solid_angle_per_unit(p);
  return [=](double x) {
    const double theta = per_unit * x / 4.0;
    return evolve(control_unit(space, ControlKind::HighOrder, 0.0, theta, m), start);
  };
}

// Peak-normalized detection fringe of the high-order scenario as a function
// of the chosen parameter, measured from theta0.
inline std::function<double(double)> ideal_fringe(int n_photons, int m, int sigma, Parameterization p) {
  ScanConfig c = default_config(Scenario::HighOrderPB);
  c.m = m;
  c.sigma = sigma;
  c.n_photons = n_photons;
  const double t0 = resolved_theta0(c);
  const double per_unit = solid_angle_per_unit(p);
  const double peak = std::ldexp(1.0, 1 - n_photons);
  return [=](double x) {
    const ScenarioSetup setup = build_scenario(c, t0 + per_unit * x / 4.0);
    const FockState out = evolve(compose(setup.chain), setup.input);
    return detection_probability(out, setup.projection) / peak;
  };
}

struct FisherReport {
  Parameterization parameterization = Parameterization::SolidAngle;
  int n_photons = 1;
  int m = 0;
  int sigma = +1;
  double qfi = 0.0;
  double cfi = 0.0;
  std::optional<double> crb;  // empty when qfi = 0
};

inline FisherReport fisher_report(int n_photons, int m, int sigma, Parameterization p) {
  FisherReport r{p, n_photons, m, sigma, qfi_noon(n_photons, m, sigma, p), 0.0, std::nullopt};
  const int j = m + sigma;
  if (j != 0) {
    // Half-fringe point, where the normalized fringe equals 1/2.
    const double theta_rel = kPi / (8.0 * n_photons * std::abs(j));
    r.cfi = cfi_binary(ideal_fringe(n_photons, m, sigma, p), 4.0 * theta_rel / solid_angle_per_unit(p));
    r.crb = crb(r.qfi);
  }
  return r;
}

}  // namespace pbsim
