#include "tensorcue/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tensorcue/errors.hpp"

namespace tensorcue {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_capacity(std::size_t count, std::size_t capacity) {
  if (count > capacity) {
    throw capacity_error("tensor product of " + std::to_string(count) +
                         " points exceeds capacity " + std::to_string(capacity));
  }
}

// Folds x into [-L/2, L/2).
double fold(double x, double circumference) {
  double r = x - circumference * std::floor(x / circumference + 0.5);
  if (r >= 0.5 * circumference) r -= circumference;
  if (r < -0.5 * circumference) r += circumference;
  return r;
}

}  // namespace

PhaseVector tensor_phases(const PhaseVector& a, const PhaseVector& b, std::size_t capacity) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tensor_phases: empty factor");
  check_capacity(a.size() * b.size(), capacity);
  std::vector<double> sums;
  sums.reserve(a.size() * b.size());
  for (double x : a) {
    for (double y : b) sums.push_back(wrap_angle(x + y));
  }
  return PhaseVector(std::move(sums));
}

PhaseVector triple_tensor(const PhaseVector& a, const PhaseVector& b, const PhaseVector& c,
                          std::size_t capacity) {
  if (a.empty() || b.empty() || c.empty()) throw std::invalid_argument("triple_tensor: empty factor");
  check_capacity(a.size() * b.size() * c.size(), capacity);
  std::vector<double> sums;
  sums.reserve(a.size() * b.size() * c.size());
  for (double x : a) {
    for (double y : b) {
      for (double z : c) sums.push_back(wrap_angle(x + y + z));
    }
  }
  return PhaseVector(std::move(sums));
}

RescaledConfig rescale_center(const PhaseVector& phases, std::size_t factor_product) {
  if (factor_product == 0 || phases.size() != factor_product) {
    throw std::invalid_argument("rescale_center: factor product " + std::to_string(factor_product) +
                                " does not match " + std::to_string(phases.size()) + " phases");
  }
  RescaledConfig out;
  out.circumference = static_cast<double>(factor_product);
  const double scale = out.circumference / kTwoPi;
  const double half = 0.5 * out.circumference;
  out.points.reserve(phases.size());
  std::size_t wrapped = 0;
  for (double x : phases) {
    double theta = scale * (x - std::numbers::pi);
    if (theta >= half) {
      theta -= out.circumference;
      ++wrapped;
    }
    out.points.push_back(theta);
  }
  // Rounding can push the last few phases onto +L/2; they belong at the front.
  if (wrapped > 0) {
    std::rotate(out.points.rbegin(), out.points.rbegin() + static_cast<std::ptrdiff_t>(wrapped),
                out.points.rend());
  }
  return out;
}

std::vector<double> window(const RescaledConfig& config, WindowSpec w) {
  if (!(w.half_width > 0.0)) throw std::invalid_argument("window: half-width must be positive");
  if (!config.points.empty() && 2.0 * w.half_width > config.circumference) {
    throw std::invalid_argument("window: width " + std::to_string(2.0 * w.half_width) +
                                " exceeds circumference " + std::to_string(config.circumference));
  }
  auto lo = std::lower_bound(config.points.begin(), config.points.end(), -w.half_width);
  auto hi = std::upper_bound(config.points.begin(), config.points.end(), w.half_width);
  return {lo, hi};
}

double circular_difference(double a, double b, double circumference) {
  double d = fold(b - a, circumference);
  if (d == -0.5 * circumference) d = 0.5 * circumference;
  return d;
}

RescaledConfig rotate(const RescaledConfig& config, double shift) {
  RescaledConfig out;
  out.circumference = config.circumference;
  out.points.reserve(config.size());
  for (double x : config.points) out.points.push_back(fold(x + shift, config.circumference));
  std::sort(out.points.begin(), out.points.end());
  return out;
}

}  // namespace tensorcue
