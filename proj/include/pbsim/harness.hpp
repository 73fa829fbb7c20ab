#pragma once

// End-to-end fringe simulation: N00N preparation over |H,0>/|V,0>, mode
// conversion, cyclic control, reverse conversion, projection and N-photon
// coincidence probability.
//
// Scan coordinate convention. For the OAM, high-order and two-parameter
// scenarios the first element of each control pair sits at theta0 and the
// scanned angle is the absolute angle of the second one, so the relative
// angle is theta - theta0. For the polarization scenario the single HWP sits
// at theta0 + theta.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pbsim/elements.hpp"
#include "pbsim/fit.hpp"
#include "pbsim/fock.hpp"
#include "pbsim/parallel.hpp"

namespace pbsim {

enum class Scenario { PolarizationPB, OamGeometric, HighOrderPB, TwoParam2D };

struct AxisGrid {
  double start = 0.0;  // rad
  double end = kPi / 2.0;
  int points = 181;

  double at(int i) const { return start + (end - start) * i / (points - 1); }
  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = at(i);
    return v;
  }
  double step() const { return (end - start) / (points - 1); }
  bool operator==(const AxisGrid&) const = default;
};

struct ScanConfig {
  Scenario scenario = Scenario::PolarizationPB;
  int m = 1;
  int sigma = +1;
  int n_photons = 1;
  AxisGrid theta{};                     // theta, or theta1 (HWP pair) for TwoParam2D
  AxisGrid theta2{0.0, kPi / 2.0, 61};  // theta2 (DP pair), TwoParam2D only
  std::optional<double> theta0;         // rad; scenario default when empty
  std::optional<int> shots;
  std::uint64_t seed = 0xB0B5;
  double background = 0.0;  // additive, per point
  bool normalize_peak = false;
  int threads = 0;

  bool operator==(const ScanConfig&) const = default;
};

inline ScanConfig default_config(Scenario scenario) {
  ScanConfig c;
  c.scenario = scenario;
  if (scenario == Scenario::TwoParam2D) c.theta.points = 61;
  return c;
}

inline void validate(const ScanConfig& c) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::ConfigError, why); };
  if (c.n_photons < 1 || c.n_photons > 4) fail("n_photons must be in 1..4");
  if (c.sigma != 1 && c.sigma != -1) fail("sigma must be +1 or -1");
  for (const AxisGrid* g : {&c.theta, &c.theta2}) {
    if (!(g->end > g->start)) fail("grid end must exceed start");
    if (g->points < 2) fail("grid needs at least 2 points");
  }
  if (c.shots && *c.shots <= 0) fail("shots must be positive");
  if (c.scenario == Scenario::OamGeometric && c.m == 0) fail("OAM sphere order m must be nonzero");
  if (!(c.background >= 0.0 && c.background <= 1.0)) fail("background must be in [0, 1]");
  if (c.threads < 0) fail("threads must be >= 0");
}

inline int total_angular_momentum(const ScanConfig& c) { return c.m + c.sigma; }

inline double default_theta0(const ScanConfig& c) {
  switch (c.scenario) {
    case Scenario::PolarizationPB: return 0.0;
    case Scenario::OamGeometric: return kPi / (4.0 * c.m);
    case Scenario::HighOrderPB: {
      const int j = total_angular_momentum(c);
      return j == 0 ? 0.0 : kPi / (4.0 * j);
    }
    case Scenario::TwoParam2D: return kPi / 8.0;
  }
  return 0.0;
}

inline double resolved_theta0(const ScanConfig& c) { return c.theta0.value_or(default_theta0(c)); }

// Config with every default materialized.
inline ScanConfig resolve(ScanConfig c) {
  validate(c);
  c.theta0 = resolved_theta0(c);
  return c;
}

inline ModeSpace scenario_space(const ScanConfig& c) {
  if (c.scenario == Scenario::PolarizationPB) return default_space(0, 0.0);
  return default_space(c.m, c.m / 2.0);
}

struct ScenarioSetup {
  FockState input;
  std::vector<ModeUnitary> chain;  // propagation order
  SinglePhotonState projection;    // every photon is tested against this mode
};

// Preparation for the vector-mode scenarios: QWP then q-plate of charge
// sigma*m/2, sending |H,0> -> |R, sigma m> and |V,0> -> |L, -sigma m>.
inline std::vector<ModeUnitary> vector_mode_preparation(ModeSpace s, int m, int sigma) {
  return {qwp(s, kQuarterWaveAngle), q_plate(s, sigma * m / 2.0)};
}

inline std::vector<ModeUnitary> vector_mode_unpreparation(ModeSpace s, int m, int sigma) {
  return {q_plate(s, sigma * m / 2.0), qwp(s, -kQuarterWaveAngle)};
}

inline ScenarioSetup build_scenario_2d(const ScanConfig& config, double theta1, double theta2) {
  validate(config);
  const ModeSpace s = scenario_space(config);
  const double t0 = resolved_theta0(config);
  std::vector<ModeUnitary> chain = vector_mode_preparation(s, config.m, config.sigma);
  chain.push_back(hwp_dove_pair(s, t0, theta1, t0, theta2));
  for (auto& u : vector_mode_unpreparation(s, config.m, config.sigma)) chain.push_back(std::move(u));
  return {make_noon_state(s, {Pol::H, 0}, {Pol::V, 0}, config.n_photons), std::move(chain),
          SinglePhotonState::basis(s, {Pol::D, 0})};
}

inline ScenarioSetup build_scenario(const ScanConfig& config, double theta) {
  validate(config);
  const ModeSpace s = scenario_space(config);
  const double t0 = resolved_theta0(config);
  FockState input = make_noon_state(s, {Pol::H, 0}, {Pol::V, 0}, config.n_photons);
  std::vector<ModeUnitary> chain;
  switch (config.scenario) {
    case Scenario::PolarizationPB:
      chain.push_back(control_unit(s, ControlKind::Polarization, t0, theta, 0));
      return {std::move(input), std::move(chain), SinglePhotonState::basis(s, {Pol::A, 0})};
    case Scenario::OamGeometric: {
      // QWP / q-plate / QWP: |H,0> -> |H,m>, |V,0> -> |V,-m>.
      chain = {qwp(s, kQuarterWaveAngle), q_plate(s, config.m / 2.0), qwp(s, kQuarterWaveAngle),
               control_unit(s, ControlKind::OamSphere, t0, theta - t0, config.m), qwp(s, -kQuarterWaveAngle),
               q_plate(s, config.m / 2.0), qwp(s, -kQuarterWaveAngle)};
      return {std::move(input), std::move(chain), SinglePhotonState::basis(s, {Pol::D, 0})};
    }
    case Scenario::HighOrderPB: {
      chain = vector_mode_preparation(s, config.m, config.sigma);
      chain.push_back(control_unit(s, ControlKind::HighOrder, t0, theta - t0, config.m));
      for (auto& u : vector_mode_unpreparation(s, config.m, config.sigma)) chain.push_back(std::move(u));
      return {std::move(input), std::move(chain), SinglePhotonState::basis(s, {Pol::D, 0})};
    }
    case Scenario::TwoParam2D:
      return build_scenario_2d(config, theta, theta);
  }
  throw Error(ErrorCode::UnsupportedScenario, "unknown scenario");
}

// N = 1: plain detection. N = 2: both photons pass the projection, then a
// 50:50 fiber splitter sends them to different detectors half the time.
inline double coincidence_probability(const FockState& state_out, const SinglePhotonState& projection,
                                      int n_photons) {
  if (n_photons != state_out.n_photons()) throw Error(ErrorCode::DimensionMismatch, "photon number mismatch");
  if (n_photons == 1) return detection_probability(state_out, projection);
  if (n_photons == 2) return 0.5 * detection_probability(state_out, projection);
  throw Error(ErrorCode::UnsupportedN, "coincidence counts are defined for N = 1, 2 only");
}

// Peak of the ideal coincidence fringe: 2^{1-N} from the N00N overlap, times
// the splitter factor for N = 2.
inline double coincidence_peak(int n_photons) {
  const double peak = std::ldexp(1.0, 1 - n_photons);
  return n_photons == 2 ? 0.5 * peak : peak;
}

inline double report_probability(const ScanConfig& c, double p) {
  if (c.normalize_peak) p /= coincidence_peak(c.n_photons);
  return std::min(1.0, p + c.background);
}

inline double simulate_setup(const ScanConfig& config, const ScenarioSetup& setup) {
  const FockState out = evolve(compose(setup.chain), setup.input);
  return report_probability(config, coincidence_probability(out, setup.projection, config.n_photons));
}

inline double simulate_probability(const ScanConfig& config, double theta) {
  return simulate_setup(config, build_scenario(config, theta));
}

inline double simulate_probability_2d(const ScanConfig& config, double theta1, double theta2) {
  return simulate_setup(config, build_scenario_2d(config, theta1, theta2));
}

// Closed-form fringe p = c (1 - cos(N (k1 theta1 + k2 theta2) + phi0)) / 2.
// For 1D scenarios theta1 = theta2 = theta and k = k1 + k2.
struct FringeLaw {
  double c = 1.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double phi0 = 0.0;

  double k() const { return k1 + k2; }
};

// Phi is the phase of the |H,0> branch relative to |V,0> before projection.
// Projection onto D gives (1 + cos(N Phi))/2 and onto A gives
// (1 + (-1)^N cos(N Phi))/2, both scaled by the coincidence peak.
inline FringeLaw fringe_law(const ScanConfig& c) {
  const double t0 = resolved_theta0(c);
  const int n = c.n_photons;
  double k1 = 0.0, k2 = 0.0, phase0 = 0.0;
  int proj_sign = +1;
  switch (c.scenario) {
    case Scenario::PolarizationPB:
      k1 = 4.0;
      phase0 = 4.0 * t0;
      proj_sign = -1;
      break;
    case Scenario::OamGeometric:
      k1 = 4.0 * c.m;
      phase0 = -k1 * t0;
      break;
    case Scenario::HighOrderPB:
    case Scenario::TwoParam2D:
      // H branch rides |R, sigma m>: 2 (theta1_rel + sigma m theta2_rel).
      k1 = 4.0;
      k2 = 4.0 * c.sigma * c.m;
      phase0 = -(k1 + k2) * t0;
      break;
  }
  const bool even_sign = (proj_sign > 0) || (n % 2 == 0);
  FringeLaw law;
  law.c = coincidence_peak(n);
  law.k1 = k1;
  law.k2 = k2;
  law.phi0 = n * phase0 + (even_sign ? kPi : 0.0);
  return law;
}

inline double analytic_probability_2d(const ScanConfig& config, double theta1, double theta2) {
  const FringeLaw law = fringe_law(config);
  const double arg = config.n_photons * (law.k1 * theta1 + law.k2 * theta2) + law.phi0;
  return report_probability(config, law.c * 0.5 * (1.0 - std::cos(arg)));
}

inline double analytic_probability(const ScanConfig& config, double theta) {
  if (config.scenario == Scenario::PolarizationPB || config.scenario == Scenario::OamGeometric) {
    const FringeLaw law = fringe_law(config);
    const double arg = config.n_photons * law.k1 * theta + law.phi0;
    return report_probability(config, law.c * 0.5 * (1.0 - std::cos(arg)));
  }
  return analytic_probability_2d(config, theta, theta);
}

// splitmix64 finalizer; decorrelates per-point substreams.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Independent Binomial(shots, p_i) draws; point i uses its own generator
// seeded from (seed, i), so the result does not depend on evaluation order.
inline std::vector<std::int64_t> sample_counts(std::span<const double> probabilities, int shots, std::uint64_t seed) {
  if (shots < 1) throw Error(ErrorCode::ConfigError, "shots must be >= 1");
  std::vector<std::int64_t> counts(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::InvalidProbability, "probability " + std::to_string(p) + " at index " + std::to_string(i));
    }
    std::mt19937_64 rng(substream_seed(seed, i));
    std::binomial_distribution<std::int64_t> draw(shots, p);
    counts[i] = draw(rng);
  }
  return counts;
}

inline std::vector<double> sample_fractions(const std::vector<std::int64_t>& counts, int shots) {
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) f[i] = static_cast<double>(counts[i]) / shots;
  return f;
}

struct ScanResult {
  std::vector<double> theta;  // rad
  std::vector<double> probability;
  std::vector<double> analytic;
  std::optional<std::vector<std::int64_t>> counts;
  FringeFit fit;                         // noiseless curve
  std::optional<FringeFit> sampled_fit;  // counts / shots
  double analytic_max_abs_err = 0.0;
};

inline ScanResult run_scan(const ScanConfig& config) {
  validate(config);
  if (config.scenario == Scenario::TwoParam2D) {
    throw Error(ErrorCode::UnsupportedScenario, "two-parameter scans go through run_scan_2d");
  }
  if (config.n_photons > 2) throw Error(ErrorCode::UnsupportedN, "coincidence scans are defined for N = 1, 2 only");
  ScanResult r;
  r.theta = config.theta.values();
  r.probability.resize(r.theta.size());
  r.analytic.resize(r.theta.size());
  parallel_for(r.theta.size(), config.threads, [&](std::size_t i) {
    r.probability[i] = simulate_probability(config, r.theta[i]);
    r.analytic[i] = analytic_probability(config, r.theta[i]);
  });
  for (std::size_t i = 0; i < r.theta.size(); ++i)
    r.analytic_max_abs_err = std::max(r.analytic_max_abs_err, std::abs(r.probability[i] - r.analytic[i]));
  r.fit = fit_period_visibility(r.theta, r.probability);
  if (config.shots) {
    r.counts = sample_counts(r.probability, *config.shots, config.seed);
    r.sampled_fit = fit_period_visibility(r.theta, sample_fractions(*r.counts, *config.shots));
  }
  return r;
}

struct Grid2D {
  std::vector<double> theta1;
  std::vector<double> theta2;
  std::vector<double> values;  // row-major: index i1 * theta2.size() + i2

  double at(std::size_t i1, std::size_t i2) const { return values[i1 * theta2.size() + i2]; }
};

// -45 when the grid is a function of theta1 + theta2 (invariant under the
// anti-diagonal shift), +45 when it is a function of theta1 - theta2.
inline double stripe_orientation(const Grid2D& grid, double tol = 1e-9) {
  const std::size_t n1 = grid.theta1.size(), n2 = grid.theta2.size();
  if (n1 < 2 || n2 < 2) throw Error(ErrorCode::Indeterminate, "grid needs at least 2x2 points");
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  if (*hi - *lo <= tol * std::max(scale, 1.0)) throw Error(ErrorCode::ConstantGrid, "grid is constant");
  const double d1 = grid.theta1[1] - grid.theta1[0];
  const double d2 = grid.theta2[1] - grid.theta2[0];
  if (std::abs(d1 - d2) > 1e-12 * std::max(std::abs(d1), 1.0)) {
    throw Error(ErrorCode::Indeterminate, "stripe test needs equal steps along both axes");
  }
  double anti = 0.0, diag = 0.0;
  for (std::size_t i = 0; i + 1 < n1; ++i) {
    for (std::size_t j = 0; j + 1 < n2; ++j) {
      diag = std::max(diag, std::abs(grid.at(i + 1, j + 1) - grid.at(i, j)));
      anti = std::max(anti, std::abs(grid.at(i + 1, j) - grid.at(i, j + 1)));
    }
  }
  if (anti <= tol) return -45.0;
  if (diag <= tol) return +45.0;
  throw Error(ErrorCode::Indeterminate, "grid is neither a function of theta1+theta2 nor of theta1-theta2");
}

struct ScanResult2D {
  Grid2D grid;
  Grid2D analytic;
  std::optional<std::vector<std::int64_t>> counts;  // same layout as grid.values
  double analytic_max_abs_err = 0.0;
  std::optional<double> orientation_deg;  // empty for a constant grid
  FringeFit fit_theta1;                   // along theta1 at the first theta2
  FringeFit fit_theta2;                   // along theta2 at the first theta1
};

inline ScanResult2D run_scan_2d(const ScanConfig& config) {
  validate(config);
  if (config.scenario != Scenario::TwoParam2D) throw Error(ErrorCode::UnsupportedScenario, "run_scan_2d needs TwoParam2D");
  if (config.n_photons > 2) throw Error(ErrorCode::UnsupportedN, "coincidence scans are defined for N = 1, 2 only");
  ScanResult2D r;
  r.grid.theta1 = config.theta.values();
  r.grid.theta2 = config.theta2.values();
  const std::size_t n1 = r.grid.theta1.size(), n2 = r.grid.theta2.size();
  r.grid.values.resize(n1 * n2);
  r.analytic = r.grid;
  parallel_for(n1 * n2, config.threads, [&](std::size_t k) {
    const double t1 = r.grid.theta1[k / n2], t2 = r.grid.theta2[k % n2];
    r.grid.values[k] = simulate_probability_2d(config, t1, t2);
    r.analytic.values[k] = analytic_probability_2d(config, t1, t2);
  });
  for (std::size_t k = 0; k < n1 * n2; ++k)
    r.analytic_max_abs_err = std::max(r.analytic_max_abs_err, std::abs(r.grid.values[k] - r.analytic.values[k]));
  try {
    r.orientation_deg = stripe_orientation(r.grid);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConstantGrid && e.code() != ErrorCode::Indeterminate) throw;
  }
  std::vector<double> along1(n1), along2(n2);
  for (std::size_t i = 0; i < n1; ++i) along1[i] = r.grid.at(i, 0);
  for (std::size_t j = 0; j < n2; ++j) along2[j] = r.grid.at(0, j);
  r.fit_theta1 = fit_period_visibility(r.grid.theta1, along1);
  r.fit_theta2 = fit_period_visibility(r.grid.theta2, along2);
  if (config.shots) r.counts = sample_counts(r.grid.values, *config.shots, config.seed);
  return r;
}

}  // namespace pbsim
