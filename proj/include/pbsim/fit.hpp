#pragma once

// Fringe fitting: least-squares a + b cos(w theta + phi) over a frequency
// grid, refined by golden-section search on the residual.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pbsim/modes.hpp"

namespace pbsim {

struct FringeFit {
  double period = 0.0;      // radians; 0 when is_constant
  double visibility = 0.0;  // |b| / a, clamped to [0, 1]
  bool is_constant = false;
  double omega = 0.0;
  double offset = 0.0;  // a
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
  double residual = 0.0;  // sum of squared residuals at the optimum
};

namespace detail {

struct LinearFit {
  Eigen::Vector3d beta;
  double sse;
};

inline Eigen::MatrixXd fringe_design(std::span<const double> theta, double omega) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(theta.size()), 3);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = 1.0;
    x(r, 1) = std::cos(omega * theta[i]);
    x(r, 2) = std::sin(omega * theta[i]);
  }
  return x;
}

inline LinearFit fit_at(std::span<const double> theta, const Eigen::VectorXd& y, double omega) {
  const Eigen::MatrixXd x = fringe_design(theta, omega);
  const Eigen::Vector3d beta = x.colPivHouseholderQr().solve(y);
  return {beta, (x * beta - y).squaredNorm()};
}

}  // namespace detail

inline FringeFit fit_period_visibility(std::span<const double> theta, std::span<const double> values) {
  if (theta.size() != values.size()) throw Error(ErrorCode::InsufficientData, "theta and values differ in length");
  if (theta.size() < 8) throw Error(ErrorCode::InsufficientData, "need at least 8 points");
  const auto [tmin_it, tmax_it] = std::minmax_element(theta.begin(), theta.end());
  const double span = *tmax_it - *tmin_it;
  if (!(span > 0.0)) throw Error(ErrorCode::InsufficientData, "theta values do not span an interval");

  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  const double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);

  FringeFit out;
  if (y.maxCoeff() - y.minCoeff() < 1e-12 * scale) {
    out.is_constant = true;
    out.offset = y.mean();
    return out;
  }

  const double spacing = span / static_cast<double>(theta.size() - 1);
  const double base = 2.0 * kPi / span;
  const double w_lo = 0.5 * base;
  const double w_hi = kPi / spacing;
  const double step = base / 16.0;

  double best_w = w_lo;
  double best_sse = std::numeric_limits<double>::infinity();
  for (double w = w_lo; w <= w_hi; w += step) {
    const double sse = detail::fit_at(theta, y, w).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best_w = w;
    }
  }

  // Golden-section refinement on [best_w - step, best_w + step].
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(best_w - step, 1e-12);
  double b = best_w + step;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = detail::fit_at(theta, y, c).sse;
  double fd = detail::fit_at(theta, y, d).sse;
  for (int it = 0; it < 200 && (b - a) > 1e-13 * best_w; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = detail::fit_at(theta, y, c).sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = detail::fit_at(theta, y, d).sse;
    }
  }
  const double w = 0.5 * (a + b);
  const auto fit = detail::fit_at(theta, y, w);

  out.omega = w;
  out.offset = fit.beta(0);
  out.cos_coeff = fit.beta(1);
  out.sin_coeff = fit.beta(2);
  out.residual = fit.sse;
  const double amp = std::hypot(fit.beta(1), fit.beta(2));
  if (amp < 1e-6 * scale) {
    out.is_constant = true;
    out.omega = 0.0;
    return out;
  }
  out.period = 2.0 * kPi / w;
  out.visibility = out.offset > 0.0 ? std::clamp(amp / out.offset, 0.0, 1.0) : 1.0;
  return out;
}

inline FringeFit fit_period_visibility(const std::vector<double>& theta, const std::vector<double>& values) {
  return fit_period_visibility(std::span<const double>(theta), std::span<const double>(values));
}

// Delta-method standard error of the fitted visibility when each point is a
// binomial fraction of `shots` trials with true probability p[i], holding the
// frequency at `omega`.
inline double visibility_standard_error(std::span<const double> theta, std::span<const double> p, int shots,
                                        double omega) {
  const Eigen::MatrixXd x = detail::fringe_design(theta, omega);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  const Eigen::Matrix3d xtx_inv = (x.transpose() * x).inverse();
  Eigen::VectorXd var(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) var(i) = y(i) * (1.0 - y(i)) / shots;
  const Eigen::Matrix3d cov = xtx_inv * x.transpose() * var.asDiagonal() * x * xtx_inv;
  const Eigen::Vector3d beta = xtx_inv * x.transpose() * y;
  const double amp = std::hypot(beta(1), beta(2));
  const double vis = amp / beta(0);
  const Eigen::Vector3d grad(-vis / beta(0), beta(1) / (beta(0) * amp), beta(2) / (beta(0) * amp));
  return std::sqrt(grad.dot(cov * grad));
}

}  // namespace pbsim
