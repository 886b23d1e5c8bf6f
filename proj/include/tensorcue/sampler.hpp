#pragma once

// Haar-random unitary matrices and their eigenphases.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tensorcue/rng.hpp"

namespace tensorcue {

// Maps any real angle into [0, 2 pi); an exact 2 pi lands on 0.
double wrap_angle(double x);

// Sorted eigenphase configuration on [0, 2 pi).
class PhaseVector {
 public:
  PhaseVector() = default;
  // Takes already reduced phases; sorts them. Throws std::invalid_argument if
  // any value is outside [0, 2 pi).
  explicit PhaseVector(std::vector<double> phases);
  // Reduces arbitrary angles mod 2 pi first.
  static PhaseVector from_angles(std::vector<double> angles);

  std::size_t size() const { return phases_.size(); }
  bool empty() const { return phases_.empty(); }
  double operator[](std::size_t i) const { return phases_[i]; }
  std::span<const double> values() const { return phases_; }
  auto begin() const { return phases_.begin(); }
  auto end() const { return phases_.end(); }

  friend bool operator==(const PhaseVector&, const PhaseVector&) = default;

 private:
  std::vector<double> phases_;
};

struct SamplerOptions {
  int max_dim = 512;
};

// QR of a complex Ginibre matrix with the phases of diag(R) pushed into Q.
Eigen::MatrixXcd sample_haar_unitary(int n, RngStream& rng, const SamplerOptions& opts = {});

// Largest entry of |U U* - I|.
double unitarity_residual(const Eigen::MatrixXcd& u);

PhaseVector eigenphases(const Eigen::MatrixXcd& u, double tolerance = 1e-8);

PhaseVector sample_cue_phases(int n, RngStream& rng, const SamplerOptions& opts = {});

}  // namespace tensorcue
