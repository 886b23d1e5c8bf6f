#include "tensorcue/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "tensorcue/errors.hpp"

namespace tensorcue {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_angle(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("wrap_angle: non-finite angle");
  double r = x - kTwoPi * std::floor(x / kTwoPi);
  if (r >= kTwoPi || r < 0.0) r = 0.0;
  return r;
}

PhaseVector::PhaseVector(std::vector<double> phases) : phases_(std::move(phases)) {
  for (double x : phases_) {
    if (!(x >= 0.0 && x < kTwoPi)) {
      throw std::invalid_argument("PhaseVector: phase " + std::to_string(x) +
                                  " outside [0, 2pi)");
    }
  }
  std::sort(phases_.begin(), phases_.end());
}

PhaseVector PhaseVector::from_angles(std::vector<double> angles) {
  for (double& x : angles) x = wrap_angle(x);
  return PhaseVector(std::move(angles));
}

Eigen::MatrixXcd sample_haar_unitary(int n, RngStream& rng, const SamplerOptions& opts) {
  if (n < 1) throw std::invalid_argument("sample_haar_unitary: n must be >= 1");
  if (n > opts.max_dim) {
    throw capacity_error("sample_haar_unitary: n = " + std::to_string(n) + " exceeds max " +
                         std::to_string(opts.max_dim));
  }
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) z(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double mod = std::abs(d);
    if (mod > 0.0) q.col(j) *= d / mod;
  }
  return q;
}

double unitarity_residual(const Eigen::MatrixXcd& u) {
  const Eigen::Index n = u.rows();
  return (u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

PhaseVector eigenphases(const Eigen::MatrixXcd& u, double tolerance) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw std::invalid_argument("eigenphases: matrix must be square and non-empty");
  }
  if (!u.allFinite()) throw std::invalid_argument("eigenphases: non-finite entries");
  const double residual = unitarity_residual(u);
  if (residual > tolerance) {
    throw std::invalid_argument("eigenphases: unitarity residual " + std::to_string(residual) +
                                " exceeds tolerance");
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(u, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenphases: QR iteration failed");
  std::vector<double> angles;
  angles.reserve(u.rows());
  for (const auto& lambda : solver.eigenvalues()) angles.push_back(std::arg(lambda));
  return PhaseVector::from_angles(std::move(angles));
}

PhaseVector sample_cue_phases(int n, RngStream& rng, const SamplerOptions& opts) {
  return eigenphases(sample_haar_unitary(n, rng, opts));
}

}  // namespace tensorcue
