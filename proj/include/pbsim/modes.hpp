#pragma once

// Single-photon mode space: polarization x integer OAM index, truncated to
// |m| <= max_oam. Canonical storage basis is {H, V} x m ascending, H block
// first.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "pbsim/error.hpp"

namespace pbsim {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kZeroAmplitude = 1e-15;

// Polarization labels. Only H and V are storage labels; the others are
// expressed in the {H, V} basis by pol_vector().
enum class Pol { H, V, D, A, R, L };

// Spin angular momentum carried by a circular label: R -> +1, L -> -1.
constexpr int spin(Pol p) {
  if (p == Pol::R) return +1;
  if (p == Pol::L) return -1;
  return 0;
}

constexpr Pol circular(int sigma) { return sigma >= 0 ? Pol::R : Pol::L; }

inline std::string to_string(Pol p) {
  switch (p) {
    case Pol::H: return "H";
    case Pol::V: return "V";
    case Pol::D: return "D";
    case Pol::A: return "A";
    case Pol::R: return "R";
    case Pol::L: return "L";
  }
  return "?";
}

// Jones vector in the {H, V} basis. R = (H - iV)/sqrt2 carries sigma = +1.
inline Eigen::Vector2cd pol_vector(Pol p) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  switch (p) {
    case Pol::H: return {1.0, 0.0};
    case Pol::V: return {0.0, 1.0};
    case Pol::D: return {r, r};
    case Pol::A: return {r, -r};
    case Pol::R: return {r, -i * r};
    case Pol::L: return {r, i * r};
  }
  return {0.0, 0.0};
}

struct Mode {
  Pol pol = Pol::H;
  int oam = 0;

  bool canonical() const { return pol == Pol::H || pol == Pol::V; }
  bool operator==(const Mode&) const = default;
};

inline std::string to_string(const Mode& m) { return to_string(m.pol) + "," + std::to_string(m.oam); }

struct ModeSpace {
  int max_oam = 0;

  int oam_count() const { return 2 * max_oam + 1; }
  int dim() const { return 2 * oam_count(); }
  bool contains(int m) const { return m >= -max_oam && m <= max_oam; }

  // Index of a canonical mode.
  int index(Pol p, int m) const {
    if (p != Pol::H && p != Pol::V) throw Error(ErrorCode::DimensionMismatch, "index() needs an H/V label");
    if (!contains(m)) {
      throw Error(ErrorCode::TruncationOverflow,
                  "oam " + std::to_string(m) + " outside [-" + std::to_string(max_oam) + ", " +
                      std::to_string(max_oam) + "]");
    }
    return (p == Pol::H ? 0 : oam_count()) + (m + max_oam);
  }
  int index(const Mode& mode) const { return index(mode.pol, mode.oam); }

  Mode mode_at(int idx) const {
    const int k = oam_count();
    return idx < k ? Mode{Pol::H, idx - max_oam} : Mode{Pol::V, idx - k - max_oam};
  }

  bool operator==(const ModeSpace&) const = default;
};

// Default truncation for a scenario with OAM target m and q-plate charge q:
// |m| + 2*ceil(|q|) + 1.
inline ModeSpace default_space(int m_target, double q_charge) {
  return ModeSpace{std::abs(m_target) + 2 * static_cast<int>(std::ceil(std::abs(q_charge))) + 1};
}

class SinglePhotonState {
 public:
  SinglePhotonState(ModeSpace space, Eigen::VectorXcd amplitudes)
      : space_(space), amps_(std::move(amplitudes)) {
    if (amps_.size() != space_.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "amplitude vector size " + std::to_string(amps_.size()) +
                                                    " != mode-space dimension " + std::to_string(space_.dim()));
    }
  }

  // One photon in `mode`; non-canonical polarization labels are expanded.
  static SinglePhotonState basis(ModeSpace space, Mode mode) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space.dim());
    const Eigen::Vector2cd j = pol_vector(mode.pol);
    v(space.index(Pol::H, mode.oam)) = j(0);
    v(space.index(Pol::V, mode.oam)) = j(1);
    return {space, std::move(v)};
  }

  const ModeSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  cplx amplitude(Mode canonical_mode) const { return amps_(space_.index(canonical_mode)); }
  double norm() const { return amps_.norm(); }

  SinglePhotonState operator*(cplx factor) const { return {space_, amps_ * factor}; }
  SinglePhotonState operator+(const SinglePhotonState& other) const {
    if (!(other.space_ == space_)) throw Error(ErrorCode::DimensionMismatch, "adding states over different spaces");
    return {space_, amps_ + other.amps_};
  }

 private:
  ModeSpace space_;
  Eigen::VectorXcd amps_;
};

// A unitary on the truncated mode space. `overflow` flags input basis modes
// whose image would leave the truncation window; the matrix keeps them fixed
// so it stays unitary, and applying it to a state populating them is an error.
struct ModeUnitary {
  ModeSpace space;
  Eigen::MatrixXcd matrix;
  std::vector<bool> overflow;

  ModeUnitary(ModeSpace s, Eigen::MatrixXcd m)
      : space(s), matrix(std::move(m)), overflow(static_cast<std::size_t>(s.dim()), false) {
    if (matrix.rows() != space.dim() || matrix.cols() != space.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "unitary matrix shape does not match the mode space");
    }
  }

  static ModeUnitary identity(ModeSpace s) { return {s, Eigen::MatrixXcd::Identity(s.dim(), s.dim())}; }

  int dim() const { return space.dim(); }

  double unitarity_error() const {
    const Eigen::MatrixXcd g = matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(dim(), dim());
    return g.cwiseAbs().maxCoeff();
  }
  bool is_unitary(double tol = kUnitaryTol) const { return unitarity_error() < tol; }

  bool has_overflow() const {
    for (bool b : overflow)
      if (b) return true;
    return false;
  }

  ModeUnitary adjoint() const {
    ModeUnitary out(space, matrix.adjoint());
    // Flagged modes are fixed points of the matrix, so the inverse leaks on
    // the same set.
    for (int j = 0; j < dim(); ++j)
      if (overflow[static_cast<std::size_t>(j)]) out.overflow[static_cast<std::size_t>(j)] = true;
    return out;
  }

  ModeUnitary operator*(cplx phase) const {
    ModeUnitary out = *this;
    out.matrix *= phase;
    return out;
  }

  // Throws TruncationOverflow when `amps` has weight on a flagged input mode.
  void check_domain(const Eigen::VectorXcd& amps) const {
    for (int j = 0; j < dim(); ++j) {
      if (overflow[static_cast<std::size_t>(j)] && std::abs(amps(j)) > kNormTol) {
        throw Error(ErrorCode::TruncationOverflow,
                    "mode " + to_string(space.mode_at(j)) + " would leave the OAM truncation window");
      }
    }
  }
};

// Wraps an angle into (-pi, pi].
inline double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

inline SinglePhotonState normalize(const SinglePhotonState& state) {
  if (state.amplitudes().cwiseAbs().maxCoeff() < kZeroAmplitude) {
    throw Error(ErrorCode::ZeroState, "cannot normalize the zero state");
  }
  return {state.space(), state.amplitudes() / state.norm()};
}

// <a|b>, conjugate-linear in a.
inline cplx inner(const SinglePhotonState& a, const SinglePhotonState& b) {
  if (!(a.space() == b.space())) throw Error(ErrorCode::DimensionMismatch, "inner product across mode spaces");
  return a.amplitudes().dot(b.amplitudes());
}

inline SinglePhotonState apply_unitary(const ModeUnitary& u, const SinglePhotonState& state) {
  if (!(u.space == state.space())) throw Error(ErrorCode::DimensionMismatch, "unitary and state spaces differ");
  u.check_domain(state.amplitudes());
  return {state.space(), u.matrix * state.amplitudes()};
}

// Pancharatnam connection arg<initial|final> in (-pi, pi].
inline double phase_of_overlap(cplx overlap) {
  if (std::abs(overlap) < 1e-9) {
    throw Error(ErrorCode::OrthogonalStates, "overlap magnitude below 1e-9, phase undefined");
  }
  return wrap_phase(std::arg(overlap));
}

inline double pancharatnam_phase(const SinglePhotonState& initial, const SinglePhotonState& final_state) {
  return phase_of_overlap(inner(initial, final_state));
}

// True when |<a|b>| = 1 within tol, i.e. equal up to a global phase.
inline bool equal_up_to_phase(const SinglePhotonState& a, const SinglePhotonState& b, double tol = 1e-10) {
  return std::abs(std::abs(inner(a, b)) - 1.0) < tol;
}

}  // namespace pbsim
