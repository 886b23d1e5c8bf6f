#include "tensorcue/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

namespace tensorcue {

double curve_bin_average(const std::function<double(double)>& f, double a, double b) {
  static constexpr double nodes[] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                     -0.9061798459386640, 0.9061798459386640};
  static constexpr double weights[] = {0.5688888888888889, 0.4786286704993665,
                                       0.4786286704993665, 0.2369268850561891,
                                       0.2369268850561891};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += weights[i] * f(mid + half * nodes[i]);
  return 0.5 * acc;
}

CurveComparison compare_to_curve(const CorrelationHistogram& h,
                                 const std::function<double(double)>& target,
                                 CurveSampling sampling) {
  if (h.n_bins() == 0) throw std::invalid_argument("compare_to_curve: empty histogram");
  if (!h.has_error_bars()) throw std::invalid_argument("compare_to_curve: histogram has no error bars");
  const std::vector<double> se = h.standard_errors();
  CurveComparison out;
  out.per_bin_z.reserve(h.n_bins());
  double sum_sq = 0.0;
  for (std::size_t b = 0; b < h.n_bins(); ++b) {
    const double expected = sampling == CurveSampling::midpoint
                                ? target(h.midpoint(b))
                                : curve_bin_average(target, h.bin_edges[b], h.bin_edges[b + 1]);
    const double dev = h.estimate[b] - expected;
    out.max_abs_dev = std::max(out.max_abs_dev, std::abs(dev));
    sum_sq += dev * dev;
    double sigma = se[b];
    if (sigma == 0.0) {
      const double norm = static_cast<double>(h.n_samples) * 2.0 * h.circumference * h.bin_width(b);
      sigma = std::sqrt(std::max(h.counts[b], 1.0)) / norm;
    }
    const double z = dev / sigma;
    out.per_bin_z.push_back(z);
    if (std::abs(z) > 4.0) ++out.n_bins_over_4sigma;
  }
  out.rms_dev = std::sqrt(sum_sq / static_cast<double>(h.n_bins()));
  return out;
}

KsResult ks_against_exponential(const SpacingHistogram& s) {
  if (!s.normalized) throw std::invalid_argument("ks_against_exponential: spacings are not normalized");
  if (s.spacings.size() < kMinKsSample) {
    throw std::invalid_argument("ks_against_exponential: need at least " +
                                std::to_string(kMinKsSample) + " spacings, got " +
                                std::to_string(s.spacings.size()));
  }
  std::vector<double> sorted = s.spacings;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = -std::expm1(-sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  KsResult r;
  r.d_statistic = d;
  r.n = sorted.size();
  r.threshold_05 = 1.36 / std::sqrt(n);
  r.pass = d < r.threshold_05;
  return r;
}

ChiSquareResult chi_square_uniformity(std::span<const double> phases, int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("chi_square_uniformity: need at least 2 bins");
  const double expected = static_cast<double>(phases.size()) / n_bins;
  if (expected < 10.0) {
    throw std::invalid_argument("chi_square_uniformity: expected count " + std::to_string(expected) +
                                " per bin is below 10");
  }
  std::vector<double> counts(n_bins, 0.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (double x : phases) {
    if (!(x >= 0.0 && x < two_pi)) throw std::invalid_argument("chi_square_uniformity: phase outside [0, 2pi)");
    auto b = static_cast<int>(x / two_pi * n_bins);
    counts[std::min(b, n_bins - 1)] += 1.0;
  }
  ChiSquareResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.dof = n_bins - 1;
  return r;
}

double chi_square_p_value(const ChiSquareResult& r) {
  boost::math::chi_squared dist(r.dof);
  return boost::math::cdf(boost::math::complement(dist, r.statistic));
}

}  // namespace tensorcue
