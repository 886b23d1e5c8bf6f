#pragma once

// Monte Carlo estimators over samples of rescaled configurations.
//
// Pair correlations are accumulated as integer counts (stored as doubles),
// so partial histograms merge exactly in any order. Sample s contributes to
// batch s % n_batches; the spread of batch estimates gives the error bars.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tensorcue/processes.hpp"

namespace tensorcue {

inline constexpr int kDefaultBatches = 50;

struct CorrelationHistogram {
  std::vector<double> bin_edges;
  std::vector<double> counts;
  std::uint64_t n_samples = 0;
  double circumference = 0.0;
  std::vector<double> estimate;

  std::vector<std::vector<double>> batch_counts;
  std::vector<std::uint64_t> batch_samples;

  std::size_t n_bins() const { return counts.size(); }
  double bin_width(std::size_t b) const { return bin_edges[b + 1] - bin_edges[b]; }
  double midpoint(std::size_t b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }

  // Needs at least two batches that received samples.
  bool has_error_bars() const;
  // Standard deviation of the batch estimates divided by sqrt(#batches).
  std::vector<double> standard_errors() const;
};

struct SpacingHistogram {
  std::vector<double> bin_edges;
  std::vector<double> counts;
  std::uint64_t n_spacings = 0;
  bool normalized = false;
  // Spacings in units of the mean spacing, in input order.
  std::vector<double> spacings;
  std::uint64_t skipped = 0;

  std::vector<double> density() const;
};

struct EstimateBundle {
  double intensity = 0.0;
  CorrelationHistogram pair;
  SpacingHistogram spacings;
  std::vector<std::pair<double, double>> count_var;
};

double estimate_intensity(std::span<const RescaledConfig> samples);

// Empty histogram over (0, delta_max] with n_bins equal bins; the identity of merge.
CorrelationHistogram make_pair_histogram(double circumference, double delta_max, int n_bins,
                                         int n_batches = kDefaultBatches);

// Adds every ordered pair of distinct points at circular distance in
// (0, delta_max] of one configuration. Does not refresh `estimate`.
void accumulate_pairs(CorrelationHistogram& h, const RescaledConfig& config,
                      std::uint64_t sample_index);

// estimate_b = counts_b / (n_samples * 2 * L * width_b).
void refresh_estimate(CorrelationHistogram& h);

CorrelationHistogram estimate_pair_correlation(std::span<const RescaledConfig> samples,
                                               double delta_max, int n_bins,
                                               int n_batches = kDefaultBatches);

CorrelationHistogram merge(const CorrelationHistogram& a, const CorrelationHistogram& b);

// rho^(3)(0, r1, r2) from ordered triples with offsets within tol/2 of
// (r1, r2). Box smoothing of width tol biases curved targets.
double estimate_triple_correlation(std::span<const RescaledConfig> samples, double r1, double r2,
                                   double tol = 0.2);

// Consecutive circular gaps of one sorted configuration (size() entries).
std::vector<double> circular_gaps(const RescaledConfig& config);

// Bins gaps after dividing by mean_spacing, or by their sample mean when no
// mean is given. The upper edge grows to cover the largest spacing.
SpacingHistogram spacing_histogram(std::vector<double> gaps, double bin_width = 0.1,
                                   std::optional<double> mean_spacing = std::nullopt);

// Pooled gaps of all configurations, normalized to sample mean 1.
// Configurations with fewer than two points are counted in `skipped`.
SpacingHistogram nearest_neighbor_spacings(std::span<const RescaledConfig> samples,
                                           double bin_width = 0.1);

// Point count in the arc [start, start + length) of a sorted configuration.
std::size_t count_in_arc(const RescaledConfig& config, double start, double length);

// Variance of arc counts over samples and `translations` uniform offsets per
// sample; offsets for sample s come from RngStream(seed, s).
std::vector<std::pair<double, double>> count_variance(std::span<const RescaledConfig> samples,
                                                      std::span<const double> lengths,
                                                      int translations = 32,
                                                      std::uint64_t seed = 0);

// Running sums behind count_variance, mergeable like the histograms.
struct CountMoments {
  std::vector<double> lengths;
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::uint64_t observations = 0;

  explicit CountMoments(std::span<const double> lengths_ = {});
  void add(const RescaledConfig& config, std::span<const double> offsets);
  void merge(const CountMoments& other);
  std::vector<std::pair<double, double>> variances() const;
};

}  // namespace tensorcue
