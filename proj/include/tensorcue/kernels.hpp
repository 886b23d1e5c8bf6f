#pragma once

// Closed-form kernels and determinantal correlation functions of the sine
// process and of the circular unitary ensemble.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "tensorcue/errors.hpp"

namespace tensorcue {

struct KernelOptions {
  int max_order = 8;
};

namespace detail {

inline void check_finite(double u, const char* what) {
  if (!std::isfinite(u)) {
    throw std::invalid_argument(std::string(what) + ": non-finite argument");
  }
}

template <typename Scalar>
void check_order(int k, const KernelOptions& opts) {
  if (k < 1) throw std::invalid_argument("correlation order must be >= 1");
  if (k > opts.max_order) {
    throw capacity_error("correlation order " + std::to_string(k) +
                         " exceeds cap " + std::to_string(opts.max_order));
  }
}

// det of a small dense matrix via partially pivoted LU, negatives within
// 1e-10*k clamped to zero.
template <typename Scalar>
Scalar clamped_determinant(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  const Scalar det = m.partialPivLu().determinant();
  const Scalar eps = Scalar(1e-10) * static_cast<Scalar>(m.rows());
  if (det < Scalar(0) && det >= -eps) return Scalar(0);
  return det;
}

}  // namespace detail

// q(u) = sin(pi u) / (pi u), with q(0) = 1.
template <typename Scalar>
Scalar sine_q(Scalar u) {
  detail::check_finite(static_cast<double>(u), "sine_q");
  const Scalar x = std::numbers::pi_v<Scalar> * u;
  if (std::abs(u) < Scalar(1e-8)) return Scalar(1) - x * x / Scalar(6);
  return std::sin(x) / x;
}

// s_n(u) = sin(n u / 2) / (2 pi sin(u / 2)).
//
// The argument is reduced to r in (-pi, pi] with u = r + 2 pi j. Numerator
// and denominator pick up (-1)^{n j} and (-1)^j respectively, so the sign
// (-1)^{(n+1) j} is restored and the result is the literal formula for all
// u. Near r = 0 a two-term Taylor expansion of the quotient is used.
template <typename Scalar>
Scalar cue_s(int n, Scalar u) {
  if (n < 1) throw std::invalid_argument("cue_s: n must be >= 1");
  detail::check_finite(static_cast<double>(u), "cue_s");
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * pi;
  Scalar r = std::remainder(u, two_pi);
  if (r <= -pi) r += two_pi;
  const Scalar wraps = std::round((u - r) / two_pi);
  const bool flip = (n % 2 == 0) && std::fmod(std::abs(wraps), Scalar(2)) == Scalar(1);
  const Scalar nn = static_cast<Scalar>(n);
  Scalar ratio;
  if (std::abs(r) < Scalar(1e-8)) {
    ratio = nn * (Scalar(1) - (nn * nn - Scalar(1)) * r * r / Scalar(24));
  } else {
    ratio = std::sin(nn * r / 2) / std::sin(r / 2);
  }
  const Scalar value = ratio / two_pi;
  return flip ? -value : value;
}

// det[q(x_i - x_j)], the k-point function of the sine process.
template <typename Scalar>
Scalar rho_sine(std::span<const Scalar> points, const KernelOptions& opts = {}) {
  const int k = static_cast<int>(points.size());
  detail::check_order<Scalar>(k, opts);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) m(i, j) = sine_q(points[i] - points[j]);
  }
  return detail::clamped_determinant(m);
}

// det[s_n(x_i - x_j)], the k-point function of n CUE eigenphases. Requires
// k <= n; beyond that the correlation vanishes identically.
template <typename Scalar>
Scalar rho_cue(int n, std::span<const Scalar> points, const KernelOptions& opts = {}) {
  const int k = static_cast<int>(points.size());
  detail::check_order<Scalar>(k, opts);
  if (n < 1) throw std::invalid_argument("rho_cue: n must be >= 1");
  if (k > n) {
    throw std::invalid_argument("rho_cue: order " + std::to_string(k) +
                                " exceeds matrix size " + std::to_string(n));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) m(i, j) = cue_s(n, points[i] - points[j]);
  }
  return detail::clamped_determinant(m);
}

// k^{k/2} n^k / (2 pi)^k: Hadamard's inequality applied to rho_cue.
template <typename Scalar = double>
Scalar hadamard_bound(int k, int n) {
  if (k < 1 || n < 1) throw std::invalid_argument("hadamard_bound: k, n must be >= 1");
  const Scalar kk = static_cast<Scalar>(k);
  const Scalar per_row = static_cast<Scalar>(n) / (2 * std::numbers::pi_v<Scalar>);
  return std::pow(kk, kk / 2) * std::pow(per_row, kk);
}

template <typename Scalar = double>
Scalar rho_poisson(int k) {
  if (k < 1) throw std::invalid_argument("rho_poisson: k must be >= 1");
  return Scalar(1);
}

}  // namespace tensorcue
