#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "pbsim/modes.hpp"

namespace pbsim::testing {

// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
// diag(R) divided out.
inline Eigen::MatrixXcd haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR();
  for (int j = 0; j < d; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

inline SinglePhotonState random_state(ModeSpace space, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(space.dim());
  for (int i = 0; i < space.dim(); ++i) v(i) = cplx(g(rng), g(rng));
  return normalize(SinglePhotonState(space, v));
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double deg(double d) { return d * kPi / 180.0; }

// Distance between angles on the circle.
inline double angle_gap(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace pbsim::testing
