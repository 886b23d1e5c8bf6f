#pragma once

// Goodness-of-fit statistics. Pass/fail flags here are informational; the
// acceptance runner decides what gates a run.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tensorcue/estimator.hpp"

namespace tensorcue {

struct CurveComparison {
  double max_abs_dev = 0.0;
  double rms_dev = 0.0;
  std::vector<double> per_bin_z;
  int n_bins_over_4sigma = 0;
};

// How the target curve is reduced to one number per bin. A histogram bin
// estimates the average of the target over the bin, which differs from the
// midpoint value by O(width^2 f'').
enum class CurveSampling { midpoint, bin_average };

// Five-point Gauss-Legendre average of f over [a, b].
double curve_bin_average(const std::function<double(double)>& f, double a, double b);

// Bins whose batch standard error is zero fall back to the counting error
// sqrt(max(count, 1)) / normalization so z-scores stay finite.
CurveComparison compare_to_curve(const CorrelationHistogram& h,
                                 const std::function<double(double)>& target,
                                 CurveSampling sampling = CurveSampling::midpoint);

struct KsResult {
  double d_statistic = 0.0;
  std::uint64_t n = 0;
  double threshold_05 = 0.0;
  bool pass = false;
};

inline constexpr std::uint64_t kMinKsSample = 100;

// Kolmogorov-Smirnov distance to 1 - exp(-s) with the asymptotic 5% value 1.36/sqrt(n).
KsResult ks_against_exponential(const SpacingHistogram& s);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
};

// Pearson statistic of phases in [0, 2 pi) against the uniform law. Requires
// an expected count of at least 10 per bin.
ChiSquareResult chi_square_uniformity(std::span<const double> phases, int n_bins);

// Upper-tail probability of a chi-square statistic.
double chi_square_p_value(const ChiSquareResult& r);

}  // namespace tensorcue
