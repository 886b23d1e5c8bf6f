#pragma once

// Tensor-product eigenphase processes and their recentred, unit-intensity
// rescaling on a circle of circumference equal to the number of points.

#include <cstddef>
#include <span>
#include <vector>

#include "tensorcue/sampler.hpp"

namespace tensorcue {

inline constexpr std::size_t kDefaultTensorCapacity = std::size_t{1} << 22;

// Points on a circle of circumference L, each in [-L/2, L/2), sorted.
struct RescaledConfig {
  std::vector<double> points;
  double circumference = 0.0;

  std::size_t size() const { return points.size(); }
};

struct WindowSpec {
  double half_width = 0.0;
};

// {a_i + b_j mod 2 pi}, sorted, coincidences kept.
PhaseVector tensor_phases(const PhaseVector& a, const PhaseVector& b,
                          std::size_t capacity = kDefaultTensorCapacity);

PhaseVector triple_tensor(const PhaseVector& a, const PhaseVector& b, const PhaseVector& c,
                          std::size_t capacity = kDefaultTensorCapacity);

// theta = P / (2 pi) * (x - pi) on the circle of circumference P.
RescaledConfig rescale_center(const PhaseVector& phases, std::size_t factor_product);

// Points with |theta| <= half_width, sorted, multiplicity kept.
std::vector<double> window(const RescaledConfig& config, WindowSpec w);

// Signed difference b - a folded into (-L/2, L/2].
double circular_difference(double a, double b, double circumference);

// Circular rotation by `shift`, result re-sorted into [-L/2, L/2).
RescaledConfig rotate(const RescaledConfig& config, double shift);

}  // namespace tensorcue
