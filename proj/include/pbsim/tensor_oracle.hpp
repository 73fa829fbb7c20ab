#pragma once

// Brute-force route to N-photon product states: form the full d^N tensor
// product, symmetrize over all N! orderings, renormalize, then read off
// occupation-basis amplitudes. Deliberately shares nothing with the
// permanent-based lift in fock.hpp; it is the reference the lift is checked
// against.

#include <algorithm>
#include <numeric>
#include <vector>

#include "pbsim/fock.hpp"

namespace pbsim {

inline constexpr int kOracleMaxPhotons = 4;

inline FockState tensor_oracle(const std::vector<SinglePhotonState>& photons) {
  const int n = static_cast<int>(photons.size());
  if (n < 1 || n > kOracleMaxPhotons) {
    throw Error(ErrorCode::CapacityExceeded, "tensor oracle supports 1..4 photons, got " + std::to_string(n));
  }
  const ModeSpace space = photons.front().space();
  for (const auto& p : photons)
    if (!(p.space() == space)) throw Error(ErrorCode::DimensionMismatch, "photons over different mode spaces");
  const int d = space.dim();

  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(d);

  // sym[i_1..i_N] = (1/N!) sum_pi prod_k psi_{pi(k)}[i_k], flattened with i_1
  // most significant.
  std::vector<cplx> sym(total, 0.0);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> digits(static_cast<std::size_t>(n));
  int n_perms = 0;
  do {
    ++n_perms;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int k = n - 1; k >= 0; --k) {
        digits[static_cast<std::size_t>(k)] = static_cast<int>(rem % static_cast<std::size_t>(d));
        rem /= static_cast<std::size_t>(d);
      }
      cplx prod = 1.0;
      for (int k = 0; k < n; ++k)
        prod *= photons[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])].amplitudes()(
            digits[static_cast<std::size_t>(k)]);
      sym[flat] += prod;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  double norm2 = 0.0;
  for (auto& x : sym) {
    x /= static_cast<double>(n_perms);
    norm2 += std::norm(x);
  }
  if (norm2 < kZeroAmplitude * kZeroAmplitude) throw Error(ErrorCode::ZeroState, "symmetrized product vanishes");
  const double scale = 1.0 / std::sqrt(norm2);

  // A pattern with occupations n_i spans N!/prod n_i! equal tensor entries.
  auto basis = make_fock_basis(space, n);
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(basis->size()));
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const Pattern& p = basis->pattern(i);
    std::size_t flat = 0;
    for (int mode : p) flat = flat * static_cast<std::size_t>(d) + static_cast<std::size_t>(mode);
    double orderings = factorial(n);
    for (int mode = 0; mode < d; ++mode)
      orderings /= factorial(static_cast<int>(std::count(p.begin(), p.end(), mode)));
    amps(static_cast<Eigen::Index>(i)) = std::sqrt(orderings) * sym[flat] * scale;
  }
  return {basis, std::move(amps)};
}

}  // namespace pbsim
