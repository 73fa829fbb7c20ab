#pragma once

// Command-line front end: JSON/flag configs in, CSV and JSON files out.
//
//   pbsim scan    1D fringe scan       -> CSV + JSON sidecar
//   pbsim scan2d  two-parameter grid   -> long-form CSV + JSON sidecar
//   pbsim phase   geometric phase table
//   pbsim qfi     Fisher report (JSON, also echoed to stdout)
//   pbsim trace   sphere trajectory (JSON)
//
// Angles are degrees on the surface and radians inside. Exit codes: 0 ok,
// 2 configuration or I/O error, 3 numeric-domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pbsim/harness.hpp"
#include "pbsim/metrology.hpp"
#include "pbsim/sphere.hpp"

namespace pbsim {

inline constexpr const char* kVersion = "1.0.0";

using json = nlohmann::json;

inline double to_deg(double rad) { return rad * 180.0 / kPi; }
inline double to_rad(double deg) { return deg * kPi / 180.0; }

// --- scenario names -------------------------------------------------------

inline std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::PolarizationPB: return "polarization";
    case Scenario::OamGeometric: return "oam";
    case Scenario::HighOrderPB: return "high-order";
    case Scenario::TwoParam2D: return "two-param";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::PolarizationPB, Scenario::OamGeometric, Scenario::HighOrderPB, Scenario::TwoParam2D})
    if (scenario_name(s) == name) return s;
  throw Error(ErrorCode::ConfigError, "scenario: unknown value '" + name + "'");
}

inline SphereKind parse_sphere(const std::string& name, int m, int sigma) {
  if (name == "polarization") return SphereKind::polarization();
  if (name == "oam") {
    if (m == 0) throw Error(ErrorCode::ConfigError, "m: OAM sphere order must be nonzero");
    return SphereKind::oam(m);
  }
  if (name == "high-order") return SphereKind::high_order(m, sigma);
  throw Error(ErrorCode::ConfigError, "sphere: unknown value '" + name + "'");
}

inline Parameterization parse_parameterization(const std::string& name) {
  if (name == "solid-angle") return Parameterization::SolidAngle;
  if (name == "control-angle") return Parameterization::ControlAngle;
  throw Error(ErrorCode::ConfigError, "param: unknown value '" + name + "'");
}

inline Pole parse_pole(const std::string& name) {
  if (name == "north") return Pole::North;
  if (name == "south") return Pole::South;
  throw Error(ErrorCode::ConfigError, "pole: unknown value '" + name + "'");
}

inline std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ConfigError, "seed: not an unsigned 64-bit integer: '" + text + "'");
}

// --- config JSON ----------------------------------------------------------
//
// Angle keys come in _deg and _rad spellings; the writer uses _rad so that a
// written config parses back bit-for-bit.

namespace detail {

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, key + ": " + e.what());
  }
}

inline std::optional<double> angle(const json& obj, const std::string& stem) {
  const bool deg = obj.contains(stem + "_deg"), rad = obj.contains(stem + "_rad");
  if (deg && rad) throw Error(ErrorCode::ConfigError, stem + ": both _deg and _rad given");
  if (deg) return to_rad(get_as<double>(obj.at(stem + "_deg"), stem + "_deg"));
  if (rad) return get_as<double>(obj.at(stem + "_rad"), stem + "_rad");
  return std::nullopt;
}

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "scenario",        "m",           "sigma",           "n_photons",       "theta_start_deg", "theta_start_rad",
      "theta_end_deg",   "theta_end_rad", "points",        "theta2_start_deg", "theta2_start_rad", "theta2_end_deg",
      "theta2_end_rad",  "points2",     "theta0_deg",      "theta0_rad",      "shots",           "seed",
      "background",      "normalize_peak", "threads"};
  return keys;
}

}  // namespace detail

// Fills `base` from a JSON object. Unknown keys are rejected.
inline ScanConfig apply_config_json(const json& obj, ScanConfig base) {
  if (!obj.is_object()) throw Error(ErrorCode::ConfigError, "config: expected a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!detail::config_keys().contains(key)) throw Error(ErrorCode::ConfigError, key + ": unknown key");
  }
  using detail::get_as;
  if (obj.contains("scenario")) base.scenario = parse_scenario(get_as<std::string>(obj["scenario"], "scenario"));
  if (obj.contains("m")) base.m = get_as<int>(obj["m"], "m");
  if (obj.contains("sigma")) base.sigma = get_as<int>(obj["sigma"], "sigma");
  if (obj.contains("n_photons")) base.n_photons = get_as<int>(obj["n_photons"], "n_photons");
  if (auto v = detail::angle(obj, "theta_start")) base.theta.start = *v;
  if (auto v = detail::angle(obj, "theta_end")) base.theta.end = *v;
  if (obj.contains("points")) base.theta.points = get_as<int>(obj["points"], "points");
  if (auto v = detail::angle(obj, "theta2_start")) base.theta2.start = *v;
  if (auto v = detail::angle(obj, "theta2_end")) base.theta2.end = *v;
  if (obj.contains("points2")) base.theta2.points = get_as<int>(obj["points2"], "points2");
  if (auto v = detail::angle(obj, "theta0")) base.theta0 = *v;
  if (obj.contains("shots")) {
    if (obj["shots"].is_null()) {
      base.shots.reset();
    } else {
      base.shots = get_as<int>(obj["shots"], "shots");
    }
  }
  if (obj.contains("seed")) {
    const json& s = obj["seed"];
    base.seed = s.is_string() ? parse_seed(s.get<std::string>()) : get_as<std::uint64_t>(s, "seed");
  }
  if (obj.contains("background")) base.background = get_as<double>(obj["background"], "background");
  if (obj.contains("normalize_peak")) base.normalize_peak = get_as<bool>(obj["normalize_peak"], "normalize_peak");
  if (obj.contains("threads")) base.threads = get_as<int>(obj["threads"], "threads");
  return base;
}

inline json config_to_json(const ScanConfig& c) {
  json j;
  j["scenario"] = scenario_name(c.scenario);
  j["m"] = c.m;
  j["sigma"] = c.sigma;
  j["n_photons"] = c.n_photons;
  j["theta_start_rad"] = c.theta.start;
  j["theta_end_rad"] = c.theta.end;
  j["points"] = c.theta.points;
  j["theta2_start_rad"] = c.theta2.start;
  j["theta2_end_rad"] = c.theta2.end;
  j["points2"] = c.theta2.points;
  if (c.theta0) j["theta0_rad"] = *c.theta0;
  j["shots"] = c.shots ? json(*c.shots) : json(nullptr);
  j["seed"] = c.seed;
  j["background"] = c.background;
  j["normalize_peak"] = c.normalize_peak;
  j["threads"] = c.threads;
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

// --- state serialization --------------------------------------------------

// {"H,1": [re, im], ...} over the nonzero amplitudes.
inline json state_to_json(const SinglePhotonState& s) {
  json j = json::object();
  for (int i = 0; i < s.dim(); ++i) {
    const cplx a = s.amplitudes()(i);
    if (std::abs(a) > kZeroAmplitude) j[to_string(s.space().mode_at(i))] = {a.real(), a.imag()};
  }
  return j;
}

// Patterns are keyed by their modes joined with ';'.
inline json state_to_json(const FockState& s) {
  json j = json::object();
  for (std::size_t i = 0; i < s.basis()->size(); ++i) {
    const cplx a = s.amplitudes()(static_cast<Eigen::Index>(i));
    if (std::abs(a) <= kZeroAmplitude) continue;
    std::string key;
    for (int idx : s.basis()->pattern(i)) key += (key.empty() ? "" : ";") + to_string(s.space().mode_at(idx));
    j[key] = {a.real(), a.imag()};
  }
  return j;
}

// --- output formatting ----------------------------------------------------

// Probabilities print fixed with 12 decimals, angles with 12 significant digits.
inline std::string fmt_prob(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", p);
  return buf;
}

inline std::string fmt_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline std::string scan_csv(const ScanResult& r) {
  std::ostringstream os;
  os << "theta_deg,probability,counts,analytic_probability\n";
  for (std::size_t i = 0; i < r.theta.size(); ++i) {
    os << fmt_num(to_deg(r.theta[i])) << ',' << fmt_prob(r.probability[i]) << ',';
    if (r.counts) os << (*r.counts)[i];
    os << ',' << fmt_prob(r.analytic[i]) << '\n';
  }
  return os.str();
}

inline std::string scan2d_csv(const ScanResult2D& r) {
  std::ostringstream os;
  os << "theta1_deg,theta2_deg,probability\n";
  for (std::size_t i = 0; i < r.grid.theta1.size(); ++i)
    for (std::size_t j = 0; j < r.grid.theta2.size(); ++j)
      os << fmt_num(to_deg(r.grid.theta1[i])) << ',' << fmt_num(to_deg(r.grid.theta2[j])) << ','
         << fmt_prob(r.grid.at(i, j)) << '\n';
  return os.str();
}

inline json fit_to_json(const FringeFit& f) {
  return {{"fitted_period_deg", f.is_constant ? json(nullptr) : json(to_deg(f.period))},
          {"visibility", f.visibility},
          {"is_constant", f.is_constant}};
}

struct RunManifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double duration_s = 0.0;

  json to_json() const {
    return {{"command", command},   {"config", config},         {"seed", seed}, {"version", kVersion},
            {"outputs", outputs},   {"duration_s", duration_s}};
  }
};

inline std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

// Thread count after the PBSIM_THREADS cap (0 = auto).
inline int effective_threads(int requested) {
  const char* env = std::getenv("PBSIM_THREADS");
  if (!env || !*env) return requested;
  int cap = 0;
  try {
    cap = std::stoi(env);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "PBSIM_THREADS: not an integer");
  }
  if (cap < 0) throw Error(ErrorCode::ConfigError, "PBSIM_THREADS: must be >= 0");
  if (cap == 0) return requested;
  return requested == 0 ? cap : std::min(requested, cap);
}

// --- run_command ----------------------------------------------------------

namespace detail {

// Scan flags; unset flags leave the file/default value alone.
struct ScanFlags {
  std::string config_path;
  std::optional<std::string> scenario;
  std::optional<int> m, sigma, n, points, points2, shots, threads;
  std::optional<double> from, to, from2, to2, theta0, background;
  std::optional<std::string> seed;
  bool normalize_peak = false;
  std::string out;

  void attach(CLI::App* app, bool two_d) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--scenario", scenario, "polarization | oam | high-order | two-param");
    app->add_option("--m", m, "OAM order");
    app->add_option("--sigma", sigma, "spin, +1 or -1");
    app->add_option("--n", n, "photon number N");
    app->add_option("--from", from, two_d ? "theta1 start (deg)" : "theta start (deg)");
    app->add_option("--to", to, two_d ? "theta1 end (deg)" : "theta end (deg)");
    app->add_option("--points", points, "grid points");
    if (two_d) {
      app->add_option("--from2", from2, "theta2 start (deg)");
      app->add_option("--to2", to2, "theta2 end (deg)");
      app->add_option("--points2", points2, "theta2 grid points");
    }
    app->add_option("--theta0", theta0, "offset angle (deg)");
    app->add_option("--shots", shots, "shots per point");
    app->add_option("--seed", seed, "RNG seed (decimal or 0x hex)");
    app->add_option("--background", background, "additive background probability");
    app->add_flag("--normalize-peak", normalize_peak, "divide by the ideal peak");
    app->add_option("--threads", threads, "worker threads (0 = auto)");
    app->add_option("--out", out, "output CSV path")->required();
  }

  ScanConfig resolve_config() const {
    json file = json::object();
    if (!config_path.empty()) file = read_json_file(config_path);
    if (!scenario && !(file.is_object() && file.contains("scenario"))) {
      throw Error(ErrorCode::ConfigError, "scenario: missing");
    }
    ScanConfig c = apply_config_json(file, ScanConfig{});
    if (scenario) c.scenario = parse_scenario(*scenario);
    if (!file.contains("points") && !points) c.theta.points = default_config(c.scenario).theta.points;
    if (m) c.m = *m;
    if (sigma) c.sigma = *sigma;
    if (n) c.n_photons = *n;
    if (from) c.theta.start = to_rad(*from);
    if (to) c.theta.end = to_rad(*to);
    if (points) c.theta.points = *points;
    if (from2) c.theta2.start = to_rad(*from2);
    if (to2) c.theta2.end = to_rad(*to2);
    if (points2) c.theta2.points = *points2;
    if (theta0) c.theta0 = to_rad(*theta0);
    if (shots) c.shots = *shots;
    if (seed) c.seed = parse_seed(*seed);
    if (background) c.background = *background;
    if (normalize_peak) c.normalize_peak = true;
    if (threads) c.threads = *threads;
    return resolve(c);
  }
};

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline void run_scan_command(const ScanFlags& f, Clock::time_point t0) {
  ScanConfig c = f.resolve_config();
  if (c.scenario == Scenario::TwoParam2D) {
    throw Error(ErrorCode::UnsupportedScenario, "scenario: two-param needs the scan2d subcommand");
  }
  ScanConfig run = c;
  run.threads = effective_threads(c.threads);
  const ScanResult r = run_scan(run);
  const std::string side = sidecar_path(f.out);
  write_text(f.out, scan_csv(r));
  json j = fit_to_json(r.fit);
  j["analytic_max_abs_err"] = r.analytic_max_abs_err;
  if (r.sampled_fit) j["sampled_fit"] = fit_to_json(*r.sampled_fit);
  j["theta0_deg"] = to_deg(*c.theta0);
  j["manifest"] = RunManifest{"scan", config_to_json(c), c.seed, {f.out, side}, seconds_since(t0)}.to_json();
  write_text(side, j.dump(2) + "\n");
}

inline void run_scan2d_command(const ScanFlags& f, Clock::time_point t0) {
  ScanConfig c = f.resolve_config();
  ScanConfig run = c;
  run.threads = effective_threads(c.threads);
  const ScanResult2D r = run_scan_2d(run);
  const std::string side = sidecar_path(f.out);
  write_text(f.out, scan2d_csv(r));
  json j;
  j["stripe_orientation_deg"] = r.orientation_deg ? json(*r.orientation_deg) : json(nullptr);
  j["theta1_fit"] = fit_to_json(r.fit_theta1);
  j["theta2_fit"] = fit_to_json(r.fit_theta2);
  j["analytic_max_abs_err"] = r.analytic_max_abs_err;
  j["rows"] = r.grid.values.size();
  j["theta0_deg"] = to_deg(*c.theta0);
  j["manifest"] = RunManifest{"scan2d", config_to_json(c), c.seed, {f.out, side}, seconds_since(t0)}.to_json();
  write_text(side, j.dump(2) + "\n");
}

struct SphereFlags {
  std::string sphere = "high-order";
  int m = 1;
  int sigma = +1;
  std::string pole = "north";

  void attach(CLI::App* app) {
    app->add_option("--sphere", sphere, "polarization | oam | high-order");
    app->add_option("--m", m, "OAM order");
    app->add_option("--sigma", sigma, "spin, +1 or -1");
    app->add_option("--pole", pole, "north | south");
  }

  SphereKind kind() const {
    if (sigma != 1 && sigma != -1) throw Error(ErrorCode::ConfigError, "sigma: must be +1 or -1");
    return parse_sphere(sphere, m, sigma);
  }

  json to_json() const { return {{"sphere", sphere}, {"m", m}, {"sigma", sigma}, {"pole", pole}}; }
};

struct PhaseFlags {
  SphereFlags sphere;
  int n = 1;
  double from = 1.0, to = 89.0;
  int points = 89;
  std::string out;
};

// Simulated phase: arg <psi|U|psi> for the N-photon state with every photon
// in the cycled pole mode. Predicted: N J Omega / 2 with Omega the solid
// angle of the control loop.
inline void run_phase_command(const PhaseFlags& f, Clock::time_point t0) {
  const SphereKind kind = f.sphere.kind();
  const Pole pole = parse_pole(f.sphere.pole);
  if (f.n < 1 || f.n > 4) throw Error(ErrorCode::ConfigError, "n: must be in 1..4");
  if (f.points < 1) throw Error(ErrorCode::ConfigError, "points: must be >= 1");
  const ModeSpace space = kind.default_space();
  const FockState start = all_in(kind.cycled_state(space, pole), f.n);
  const int j = kind.total_angular_momentum();
  std::ostringstream os;
  os << "theta_deg,simulated_phase_rad,predicted_phase_rad,solid_angle_sr\n";
  for (int i = 0; i < f.points; ++i) {
    const double deg = f.points == 1 ? f.from : f.from + (f.to - f.from) * i / (f.points - 1);
    const double theta = to_rad(deg);
    const double omega = solid_angle(control_loop(theta, kind));
    const FockState end = evolve(control_unit(space, kind.control_kind(), 0.0, theta, kind.m), start);
    const double simulated = pancharatnam_phase(start, end);
    const double single = predicted_phase(j, omega, pole);
    os << fmt_num(deg) << ',' << fmt_num(simulated) << ',' << fmt_num(wrap_phase(f.n * single)) << ','
       << fmt_num(omega) << '\n';
  }
  write_text(f.out, os.str());
  json config = f.sphere.to_json();
  config["n_photons"] = f.n;
  config["theta_start_deg"] = f.from;
  config["theta_end_deg"] = f.to;
  config["points"] = f.points;
  const std::string side = sidecar_path(f.out);
  json jside;
  jside["manifest"] = RunManifest{"phase", config, 0, {f.out, side}, seconds_since(t0)}.to_json();
  write_text(side, jside.dump(2) + "\n");
}

struct QfiFlags {
  int n = 1, m = 1, sigma = 1;
  std::string param = "solid-angle";
  std::string out;
};

inline json fisher_to_json(const FisherReport& r) {
  return {{"parameterization", to_string(r.parameterization)},
          {"n_photons", r.n_photons},
          {"m", r.m},
          {"sigma", r.sigma},
          {"qfi", r.qfi},
          {"cfi", r.cfi},
          {"crb", r.crb ? json(*r.crb) : json(nullptr)}};
}

inline void run_qfi_command(const QfiFlags& f, Clock::time_point t0) {
  if (f.n < 1 || f.n > 4) throw Error(ErrorCode::ConfigError, "n: must be in 1..4");
  if (f.sigma != 1 && f.sigma != -1) throw Error(ErrorCode::ConfigError, "sigma: must be +1 or -1");
  const FisherReport r = fisher_report(f.n, f.m, f.sigma, parse_parameterization(f.param));
  json j = fisher_to_json(r);
  std::cout << j.dump() << "\n";
  if (!f.out.empty()) {
    json config = {{"n_photons", f.n}, {"m", f.m}, {"sigma", f.sigma}, {"param", f.param}};
    j["manifest"] = RunManifest{"qfi", config, 0, {f.out}, seconds_since(t0)}.to_json();
    write_text(f.out, j.dump(2) + "\n");
  }
}

struct TraceFlags {
  SphereFlags sphere;
  double theta = 22.5;
  int steps = 16;
  std::string out;
};

// Elements of the control unit with theta0 = 0, in propagation order. Each
// HWP+DP set is one element since neither half alone stays on the sphere.
inline std::vector<ModeUnitary> control_elements(ModeSpace s, ControlKind kind, double theta) {
  switch (kind) {
    case ControlKind::Polarization:
      return {qwp(s, kQuarterWaveAngle), hwp(s, theta), qwp(s, kQuarterWaveAngle),
              polarization_sandwich(s, 0.0).adjoint()};
    case ControlKind::OamSphere: return {dove_prism(s, 0.0), dove_prism(s, theta)};
    case ControlKind::HighOrder:
      return {compose({hwp(s, 0.0), dove_prism(s, 0.0)}), compose({hwp(s, theta), dove_prism(s, theta)})};
  }
  return {};
}

inline void run_trace_command(const TraceFlags& f, Clock::time_point t0) {
  const SphereKind kind = f.sphere.kind();
  const Pole pole = parse_pole(f.sphere.pole);
  const ModeSpace space = kind.default_space();
  if (kind.type != SphereType::Polarization && !space.contains(kind.m)) {
    throw Error(ErrorCode::TruncationOverflow, "m: outside the truncation window");
  }
  const auto elements = control_elements(space, kind.control_kind(), to_rad(f.theta));
  const auto trace = trajectory_trace(kind.cycled_state(space, pole), elements, kind, f.steps);
  json points = json::array();
  for (const auto& p : trace) points.push_back({p.s.x(), p.s.y(), p.s.z()});
  json j;
  j["points"] = points;
  j["closed"] = (trace.back().s - trace.front().s).norm() < 1e-6;
  try {
    j["solid_angle_sr"] = solid_angle(loop_from_trace(trace));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateLoop) throw;
    j["solid_angle_sr"] = nullptr;
  }
  json config = f.sphere.to_json();
  config["theta_deg"] = f.theta;
  config["steps"] = f.steps;
  j["manifest"] = RunManifest{"trace", config, 0, {f.out}, seconds_since(t0)}.to_json();
  write_text(f.out, j.dump(2) + "\n");
}

}  // namespace detail

inline int exit_code_for(ErrorCode code) { return is_config_error(code) ? 2 : 3; }

// Runs one subcommand; argv[0] is the program name. Diagnostics go to `err`
// as "error <Code>: message".
inline int run_command(const std::vector<std::string>& argv, std::ostream& err = std::cerr) {
  const auto t0 = detail::Clock::now();
  CLI::App app{"Geometric-phase simulator for structured photons", "pbsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  detail::ScanFlags scan_flags, scan2d_flags;
  scan_flags.attach(app.add_subcommand("scan", "1D fringe scan"), false);
  scan2d_flags.attach(app.add_subcommand("scan2d", "two-parameter fringe grid"), true);

  detail::PhaseFlags phase_flags;
  auto* phase = app.add_subcommand("phase", "geometric phase versus control angle");
  phase_flags.sphere.attach(phase);
  phase->add_option("--n", phase_flags.n, "photon number N");
  phase->add_option("--from", phase_flags.from, "theta start (deg)");
  phase->add_option("--to", phase_flags.to, "theta end (deg)");
  phase->add_option("--points", phase_flags.points, "grid points");
  phase->add_option("--out", phase_flags.out, "output CSV path")->required();

  detail::QfiFlags qfi_flags;
  auto* qfi = app.add_subcommand("qfi", "Fisher information report");
  qfi->add_option("--n", qfi_flags.n, "photon number N");
  qfi->add_option("--m", qfi_flags.m, "OAM order");
  qfi->add_option("--sigma", qfi_flags.sigma, "spin, +1 or -1");
  qfi->add_option("--param", qfi_flags.param, "solid-angle | control-angle");
  qfi->add_option("--out", qfi_flags.out, "output JSON path");

  detail::TraceFlags trace_flags;
  auto* trace = app.add_subcommand("trace", "sphere trajectory through the control unit");
  trace_flags.sphere.attach(trace);
  trace->add_option("--theta", trace_flags.theta, "control angle (deg)");
  trace->add_option("--steps", trace_flags.steps, "samples per element");
  trace->add_option("--out", trace_flags.out, "output JSON path")->required();

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error " << to_string(ErrorCode::ConfigError) << ": " << e.what() << "\n";
    return 2;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "scan") detail::run_scan_command(scan_flags, t0);
    if (name == "scan2d") detail::run_scan2d_command(scan2d_flags, t0);
    if (name == "phase") detail::run_phase_command(phase_flags, t0);
    if (name == "qfi") detail::run_qfi_command(qfi_flags, t0);
    if (name == "trace") detail::run_trace_command(trace_flags, t0);
  } catch (const Error& e) {
    err << "error " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error Internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

inline int run_command(int argc, const char* const* argv) {
  return run_command(std::vector<std::string>(argv, argv + argc));
}

}  // namespace pbsim
