#pragma once

// N identical photons over a ModeSpace, stored in the occupation-number
// basis of the symmetric subspace. A basis element is a sorted list of
// canonical mode indices ("pattern"); {2, 2, 5} means two photons in mode 2
// and one in mode 5.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbsim/modes.hpp"

namespace pbsim {

using Pattern = std::vector<int>;

// Binomial coefficient, saturating at SIZE_MAX.
inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > SIZE_MAX) return SIZE_MAX;
  }
  return static_cast<std::size_t>(r);
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Product of occupation factorials, prod_i n_i!.
inline double occupation_factorial(const Pattern& p) {
  double f = 1.0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= p.size(); ++i) {
    if (i < p.size() && p[i] == p[i - 1]) {
      ++run;
    } else {
      f *= factorial(static_cast<int>(run));
      run = 1;
    }
  }
  return f;
}

class FockBasis {
 public:
  FockBasis(ModeSpace space, int n_photons) : space_(space), n_(n_photons) {
    if (n_photons < 0) throw Error(ErrorCode::DimensionMismatch, "negative photon number");
    Pattern current;
    current.reserve(static_cast<std::size_t>(n_photons));
    enumerate(current, 0);
    for (std::size_t i = 0; i < patterns_.size(); ++i) lookup_.emplace(patterns_[i], i);
  }

  static std::size_t count(int dim, int n_photons) {
    return binomial(static_cast<std::size_t>(dim + n_photons - 1), static_cast<std::size_t>(n_photons));
  }

  const ModeSpace& space() const { return space_; }
  int n_photons() const { return n_; }
  std::size_t size() const { return patterns_.size(); }
  const Pattern& pattern(std::size_t i) const { return patterns_[i]; }
  const std::vector<Pattern>& patterns() const { return patterns_; }

  std::size_t index(const Pattern& p) const {
    auto it = lookup_.find(p);
    if (it == lookup_.end()) throw Error(ErrorCode::DimensionMismatch, "pattern not in this Fock basis");
    return it->second;
  }

  bool operator==(const FockBasis& o) const { return space_ == o.space_ && n_ == o.n_; }

 private:
  void enumerate(Pattern& current, int lowest) {
    if (static_cast<int>(current.size()) == n_) {
      patterns_.push_back(current);
      return;
    }
    for (int i = lowest; i < space_.dim(); ++i) {
      current.push_back(i);
      enumerate(current, i);
      current.pop_back();
    }
  }

  ModeSpace space_;
  int n_;
  std::vector<Pattern> patterns_;
  std::map<Pattern, std::size_t> lookup_;
};

using FockBasisPtr = std::shared_ptr<const FockBasis>;

// Guarded basis construction; CapacityExceeded above `capacity` elements.
inline FockBasisPtr make_fock_basis(ModeSpace space, int n_photons, std::size_t capacity = 1u << 16) {
  const std::size_t n = FockBasis::count(space.dim(), n_photons);
  if (n > capacity) {
    throw Error(ErrorCode::CapacityExceeded, "Fock basis of " + std::to_string(n) + " states exceeds limit " +
                                                 std::to_string(capacity));
  }
  return std::make_shared<const FockBasis>(space, n_photons);
}

class FockState {
 public:
  FockState(FockBasisPtr basis, Eigen::VectorXcd amplitudes) : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != basis_->size()) {
      throw Error(ErrorCode::DimensionMismatch, "amplitude vector does not match the Fock basis");
    }
  }

  static FockState vacuum(ModeSpace space) {
    Eigen::VectorXcd v(1);
    v(0) = 1.0;
    return {make_fock_basis(space, 0), v};
  }

  // Normalized basis state for a pattern of canonical mode indices (any order).
  static FockState from_pattern(ModeSpace space, Pattern pattern) {
    std::sort(pattern.begin(), pattern.end());
    auto basis = make_fock_basis(space, static_cast<int>(pattern.size()));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
    v(static_cast<Eigen::Index>(basis->index(pattern))) = 1.0;
    return {basis, v};
  }

  static FockState from_modes(ModeSpace space, const std::vector<Mode>& modes) {
    Pattern p;
    for (const auto& m : modes) p.push_back(space.index(m));
    return from_pattern(space, p);
  }

  const FockBasisPtr& basis() const { return basis_; }
  const ModeSpace& space() const { return basis_->space(); }
  int n_photons() const { return basis_->n_photons(); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  cplx amplitude(const Pattern& p) const {
    Pattern sorted = p;
    std::sort(sorted.begin(), sorted.end());
    return amps_(static_cast<Eigen::Index>(basis_->index(sorted)));
  }
  cplx amplitude(const std::vector<Mode>& modes) const {
    Pattern p;
    for (const auto& m : modes) p.push_back(space().index(m));
    return amplitude(p);
  }
  double norm() const { return amps_.norm(); }

  FockState operator*(cplx factor) const { return {basis_, amps_ * factor}; }
  FockState operator+(const FockState& other) const {
    if (!(*other.basis_ == *basis_)) throw Error(ErrorCode::DimensionMismatch, "adding Fock states over different bases");
    return {basis_, amps_ + other.amps_};
  }

 private:
  FockBasisPtr basis_;
  Eigen::VectorXcd amps_;
};

inline FockState normalize(const FockState& state) {
  if (state.amplitudes().size() == 0 || state.amplitudes().cwiseAbs().maxCoeff() < kZeroAmplitude) {
    throw Error(ErrorCode::ZeroState, "cannot normalize the zero state");
  }
  return {state.basis(), state.amplitudes() / state.norm()};
}

inline cplx inner(const FockState& a, const FockState& b) {
  if (!(*a.basis() == *b.basis())) {
    throw Error(ErrorCode::DimensionMismatch, "inner product needs equal photon number and mode space");
  }
  return a.amplitudes().dot(b.amplitudes());
}

inline double pancharatnam_phase(const FockState& initial, const FockState& final_state) {
  return phase_of_overlap(inner(initial, final_state));
}

inline bool equal_up_to_phase(const FockState& a, const FockState& b, double tol = 1e-10) {
  return std::abs(std::abs(inner(a, b)) - 1.0) < tol;
}

// Ryser's formula with a Gray-code walk over column subsets.
inline cplx permanent(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  Eigen::VectorXcd row_sums = Eigen::VectorXcd::Zero(n);
  cplx total = 0.0;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < (std::uint64_t{1} << n); ++k) {
    const std::uint64_t next = k ^ (k >> 1);
    const std::uint64_t flipped = next ^ gray;
    const int col = std::countr_zero(flipped);
    if (next & flipped) {
      row_sums += a.col(col);
    } else {
      row_sums -= a.col(col);
    }
    gray = next;
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= row_sums(i);
    const int size = std::popcount(gray);
    total += ((size & 1) ? -1.0 : 1.0) * prod;
  }
  return ((n & 1) ? -1.0 : 1.0) * total;
}

// <s| lift(U) |t> = perm(U[s, t]) / sqrt(prod s_i! prod t_j!).
inline cplx lifted_element(const Eigen::MatrixXcd& u, const Pattern& s, const Pattern& t) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXcd sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = u(s[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]);
  return permanent(sub) / std::sqrt(occupation_factorial(s) * occupation_factorial(t));
}

struct FockUnitary {
  FockBasisPtr basis;
  Eigen::MatrixXcd matrix;

  double unitarity_error() const {
    const auto n = matrix.rows();
    return (matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  }
};

inline constexpr std::size_t kDefaultLiftCapacity = 2048;

// Symmetric-subspace representation of U^{(x)N}.
inline FockUnitary lift_unitary(const ModeUnitary& u, int n_photons, std::size_t capacity = kDefaultLiftCapacity) {
  if (n_photons < 1) throw Error(ErrorCode::DimensionMismatch, "lift needs N >= 1");
  auto basis = make_fock_basis(u.space, n_photons, capacity);
  const auto size = static_cast<Eigen::Index>(basis->size());
  Eigen::MatrixXcd m(size, size);
  for (Eigen::Index c = 0; c < size; ++c)
    for (Eigen::Index r = 0; r < size; ++r)
      m(r, c) = lifted_element(u.matrix, basis->pattern(static_cast<std::size_t>(r)),
                               basis->pattern(static_cast<std::size_t>(c)));
  return {basis, std::move(m)};
}

inline void check_fock_domain(const ModeUnitary& u, const FockState& state) {
  const auto& basis = *state.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (std::abs(state.amplitudes()(static_cast<Eigen::Index>(i))) <= kNormTol) continue;
    for (int mode : basis.pattern(i)) {
      if (u.overflow[static_cast<std::size_t>(mode)]) {
        throw Error(ErrorCode::TruncationOverflow,
                    "mode " + to_string(u.space.mode_at(mode)) + " would leave the OAM truncation window");
      }
    }
  }
}

inline FockState apply(const FockUnitary& lifted, const FockState& state) {
  if (!(*lifted.basis == *state.basis())) throw Error(ErrorCode::DimensionMismatch, "lifted unitary basis differs");
  return {state.basis(), lifted.matrix * state.amplitudes()};
}

// lift(U) applied to a state without building the full lifted matrix: only
// columns of populated input patterns are evaluated.
inline FockState evolve(const ModeUnitary& u, const FockState& state) {
  if (!(u.space == state.space())) throw Error(ErrorCode::DimensionMismatch, "unitary and Fock state spaces differ");
  check_fock_domain(u, state);
  const auto& basis = *state.basis();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.amplitudes().size());
  for (std::size_t t = 0; t < basis.size(); ++t) {
    const cplx a = state.amplitudes()(static_cast<Eigen::Index>(t));
    if (std::abs(a) < kZeroAmplitude) continue;
    for (std::size_t s = 0; s < basis.size(); ++s)
      out(static_cast<Eigen::Index>(s)) += lifted_element(u.matrix, basis.pattern(s), basis.pattern(t)) * a;
  }
  return {state.basis(), std::move(out)};
}

// All N photons in the single-photon mode psi: (a_psi^dagger)^N |0> / sqrt(N!).
// Pattern amplitude is sqrt(N!/prod n_i!) * prod c_i^{n_i}.
inline FockState all_in(const SinglePhotonState& psi, int n_photons) {
  auto basis = make_fock_basis(psi.space(), n_photons);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(basis->size()));
  const double nf = factorial(n_photons);
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const Pattern& p = basis->pattern(i);
    cplx prod = 1.0;
    for (int mode : p) prod *= psi.amplitudes()(mode);
    v(static_cast<Eigen::Index>(i)) = std::sqrt(nf / occupation_factorial(p)) * prod;
  }
  return {basis, std::move(v)};
}

// (|N>_a|0>_b + |0>_a|N>_b)/sqrt2 for orthonormal single-photon modes a, b.
inline FockState make_noon_state(const SinglePhotonState& a, const SinglePhotonState& b, int n_photons) {
  if (n_photons < 1) throw Error(ErrorCode::DimensionMismatch, "N00N state needs N >= 1");
  if (std::abs(inner(a, b)) > 1e-12) throw Error(ErrorCode::SameMode, "N00N modes must be orthogonal");
  return (all_in(normalize(a), n_photons) + all_in(normalize(b), n_photons)) * cplx(1.0 / std::sqrt(2.0));
}

inline FockState make_noon_state(ModeSpace space, Mode a, Mode b, int n_photons) {
  if (a == b) throw Error(ErrorCode::SameMode, "N00N state over a single mode " + to_string(a));
  return make_noon_state(SinglePhotonState::basis(space, a), SinglePhotonState::basis(space, b), n_photons);
}

// |<N photons all in `mode` | state>|^2.
inline double detection_probability(const FockState& state, const SinglePhotonState& mode) {
  if (!(state.space() == mode.space())) throw Error(ErrorCode::DimensionMismatch, "detector mode space differs");
  if (state.n_photons() < 1) throw Error(ErrorCode::DimensionMismatch, "detection needs N >= 1");
  return std::norm(inner(all_in(mode, state.n_photons()), state));
}

}  // namespace pbsim
