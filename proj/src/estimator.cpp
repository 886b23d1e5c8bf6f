#include "tensorcue/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tensorcue/rng.hpp"

namespace tensorcue {

namespace {

void require_samples(std::span<const RescaledConfig> samples, const char* what) {
  if (samples.empty()) throw std::invalid_argument(std::string(what) + ": no samples");
  const double L = samples.front().circumference;
  for (const auto& c : samples) {
    if (c.circumference != L) {
      throw std::invalid_argument(std::string(what) + ": samples have different circumferences");
    }
  }
}

// Sorted points followed by the same points shifted by +L.
std::vector<double> unrolled(const RescaledConfig& config) {
  std::vector<double> ext;
  ext.reserve(2 * config.size());
  ext.insert(ext.end(), config.points.begin(), config.points.end());
  for (double x : config.points) ext.push_back(x + config.circumference);
  return ext;
}

bool same_grid(const CorrelationHistogram& a, const CorrelationHistogram& b) {
  return a.bin_edges == b.bin_edges && a.circumference == b.circumference &&
         a.batch_counts.size() == b.batch_counts.size();
}

}  // namespace

bool CorrelationHistogram::has_error_bars() const {
  return std::count_if(batch_samples.begin(), batch_samples.end(),
                       [](std::uint64_t s) { return s > 0; }) >= 2;
}

std::vector<double> CorrelationHistogram::standard_errors() const {
  if (!has_error_bars()) throw std::invalid_argument("histogram has fewer than two filled batches");
  const std::size_t bins = n_bins();
  std::vector<double> mean(bins, 0.0), m2(bins, 0.0);
  int used = 0;
  for (std::size_t b = 0; b < batch_counts.size(); ++b) {
    if (batch_samples[b] == 0) continue;
    ++used;
    for (std::size_t i = 0; i < bins; ++i) {
      const double e = batch_counts[b][i] /
                       (static_cast<double>(batch_samples[b]) * 2.0 * circumference * bin_width(i));
      const double delta = e - mean[i];
      mean[i] += delta / used;
      m2[i] += delta * (e - mean[i]);
    }
  }
  std::vector<double> se(bins);
  for (std::size_t i = 0; i < bins; ++i) se[i] = std::sqrt(m2[i] / (used - 1) / used);
  return se;
}

std::vector<double> SpacingHistogram::density() const {
  std::vector<double> d(counts.size(), 0.0);
  if (n_spacings == 0) return d;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d[i] = counts[i] / (static_cast<double>(n_spacings) * (bin_edges[i + 1] - bin_edges[i]));
  }
  return d;
}

double estimate_intensity(std::span<const RescaledConfig> samples) {
  require_samples(samples, "estimate_intensity");
  std::size_t total = 0;
  for (const auto& c : samples) total += c.size();
  return static_cast<double>(total) /
         (static_cast<double>(samples.size()) * samples.front().circumference);
}

CorrelationHistogram make_pair_histogram(double circumference, double delta_max, int n_bins,
                                         int n_batches) {
  if (!(circumference > 0.0)) throw std::invalid_argument("circumference must be positive");
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  if (n_batches < 1) throw std::invalid_argument("n_batches must be >= 1");
  if (!(delta_max > 0.0) || delta_max > 0.5 * circumference) {
    throw std::invalid_argument("delta_max " + std::to_string(delta_max) +
                                " must lie in (0, L/2] with L = " + std::to_string(circumference));
  }
  CorrelationHistogram h;
  h.circumference = circumference;
  h.bin_edges.resize(n_bins + 1);
  for (int i = 0; i <= n_bins; ++i) h.bin_edges[i] = delta_max * i / n_bins;
  h.counts.assign(n_bins, 0.0);
  h.estimate.assign(n_bins, 0.0);
  h.batch_counts.assign(n_batches, std::vector<double>(n_bins, 0.0));
  h.batch_samples.assign(n_batches, 0);
  return h;
}

void accumulate_pairs(CorrelationHistogram& h, const RescaledConfig& config,
                      std::uint64_t sample_index) {
  if (config.circumference != h.circumference) {
    throw std::invalid_argument("accumulate_pairs: circumference mismatch");
  }
  const std::size_t bins = h.n_bins();
  const double delta_max = h.bin_edges.back();
  const double width = delta_max / static_cast<double>(bins);
  auto& batch = h.batch_counts[sample_index % h.batch_counts.size()];
  const std::vector<double> ext = unrolled(config);
  const std::size_t n = config.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Each unordered pair is visited once from its left end and counted for
    // both orientations.
    for (std::size_t j = i + 1; j < i + n; ++j) {
      const double d = ext[j] - ext[i];
      if (d > delta_max) break;
      if (d <= 0.0) continue;
      std::size_t b = static_cast<std::size_t>(std::ceil(d / width)) - 1;
      if (b >= bins) b = bins - 1;
      if (d <= h.bin_edges[b]) --b;
      else if (b + 1 < bins && d > h.bin_edges[b + 1]) ++b;
      h.counts[b] += 2.0;
      batch[b] += 2.0;
    }
  }
  ++h.n_samples;
  ++h.batch_samples[sample_index % h.batch_samples.size()];
}

void refresh_estimate(CorrelationHistogram& h) {
  h.estimate.assign(h.n_bins(), 0.0);
  if (h.n_samples == 0) return;
  for (std::size_t b = 0; b < h.n_bins(); ++b) {
    h.estimate[b] =
        h.counts[b] / (static_cast<double>(h.n_samples) * 2.0 * h.circumference * h.bin_width(b));
  }
}

CorrelationHistogram estimate_pair_correlation(std::span<const RescaledConfig> samples,
                                               double delta_max, int n_bins, int n_batches) {
  require_samples(samples, "estimate_pair_correlation");
  CorrelationHistogram h =
      make_pair_histogram(samples.front().circumference, delta_max, n_bins, n_batches);
  for (std::size_t s = 0; s < samples.size(); ++s) accumulate_pairs(h, samples[s], s);
  refresh_estimate(h);
  return h;
}

CorrelationHistogram merge(const CorrelationHistogram& a, const CorrelationHistogram& b) {
  if (!same_grid(a, b)) throw std::invalid_argument("merge: histograms have different grids");
  CorrelationHistogram out = a;
  out.n_samples += b.n_samples;
  for (std::size_t i = 0; i < out.n_bins(); ++i) out.counts[i] += b.counts[i];
  for (std::size_t k = 0; k < out.batch_counts.size(); ++k) {
    out.batch_samples[k] += b.batch_samples[k];
    for (std::size_t i = 0; i < out.n_bins(); ++i) out.batch_counts[k][i] += b.batch_counts[k][i];
  }
  refresh_estimate(out);
  return out;
}

double estimate_triple_correlation(std::span<const RescaledConfig> samples, double r1, double r2,
                                   double tol) {
  require_samples(samples, "estimate_triple_correlation");
  const double L = samples.front().circumference;
  if (!(tol > 0.0)) throw std::invalid_argument("estimate_triple_correlation: tol must be positive");
  if (!(r1 > 0.0) || !(r1 < r2) || r2 > 0.25 * L) {
    throw std::invalid_argument("estimate_triple_correlation: need 0 < r1 < r2 <= L/4");
  }
  if (r2 - r1 < tol) {
    throw std::invalid_argument("estimate_triple_correlation: r1 and r2 closer than tol");
  }
  const double h = 0.5 * tol;
  double triples = 0.0;
  for (const auto& config : samples) {
    const std::vector<double> ext = unrolled(config);
    const std::size_t n = config.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto first = ext.begin() + static_cast<std::ptrdiff_t>(i + 1);
      const auto last = ext.begin() + static_cast<std::ptrdiff_t>(i + n);
      const double x = ext[i];
      const auto n1 = std::upper_bound(first, last, x + r1 + h) - std::lower_bound(first, last, x + r1 - h);
      if (n1 == 0) continue;
      const auto n2 = std::upper_bound(first, last, x + r2 + h) - std::lower_bound(first, last, x + r2 - h);
      triples += static_cast<double>(n1) * static_cast<double>(n2);
    }
  }
  return triples / (static_cast<double>(samples.size()) * L * tol * tol);
}

std::vector<double> circular_gaps(const RescaledConfig& config) {
  const std::size_t n = config.size();
  std::vector<double> gaps;
  if (n < 2) return gaps;
  gaps.reserve(n);
  for (std::size_t i = 0; i + 1 < n; ++i) gaps.push_back(config.points[i + 1] - config.points[i]);
  gaps.push_back(config.points.front() + config.circumference - config.points.back());
  return gaps;
}

SpacingHistogram spacing_histogram(std::vector<double> gaps, double bin_width,
                                   std::optional<double> mean_spacing) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("spacing_histogram: bin width must be positive");
  SpacingHistogram out;
  out.n_spacings = gaps.size();
  if (gaps.empty()) return out;
  double mean = mean_spacing.value_or(
      std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size()));
  if (!(mean > 0.0)) throw std::invalid_argument("spacing_histogram: mean spacing must be positive");
  double largest = 0.0;
  for (double& g : gaps) {
    g /= mean;
    largest = std::max(largest, g);
  }
  const auto bins = static_cast<std::size_t>(std::floor(largest / bin_width)) + 1;
  out.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) out.bin_edges[i] = bin_width * static_cast<double>(i);
  out.counts.assign(bins, 0.0);
  for (double g : gaps) {
    auto b = static_cast<std::size_t>(g / bin_width);
    out.counts[std::min(b, bins - 1)] += 1.0;
  }
  out.normalized = true;
  out.spacings = std::move(gaps);
  return out;
}

SpacingHistogram nearest_neighbor_spacings(std::span<const RescaledConfig> samples,
                                           double bin_width) {
  std::vector<double> pooled;
  std::uint64_t skipped = 0;
  for (const auto& config : samples) {
    if (config.size() < 2) {
      ++skipped;
      continue;
    }
    const auto gaps = circular_gaps(config);
    pooled.insert(pooled.end(), gaps.begin(), gaps.end());
  }
  SpacingHistogram out = spacing_histogram(std::move(pooled), bin_width);
  out.skipped = skipped;
  return out;
}

std::size_t count_in_arc(const RescaledConfig& config, double start, double length) {
  const auto& pts = config.points;
  const double L = config.circumference;
  if (length >= L) return pts.size();
  // Fold start into [-L/2, L/2).
  double a = start - L * std::floor(start / L + 0.5);
  if (a >= 0.5 * L) a -= L;
  const double b = a + length;
  auto count_between = [&](double lo, double hi) {
    return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), hi) -
                                    std::lower_bound(pts.begin(), pts.end(), lo));
  };
  if (b <= 0.5 * L) return count_between(a, b);
  return count_between(a, 0.5 * L) + count_between(-0.5 * L, b - L);
}

CountMoments::CountMoments(std::span<const double> lengths_)
    : lengths(lengths_.begin(), lengths_.end()),
      sum(lengths_.size(), 0.0),
      sum_sq(lengths_.size(), 0.0) {}

void CountMoments::add(const RescaledConfig& config, std::span<const double> offsets) {
  for (double len : lengths) {
    if (len > 0.5 * config.circumference) {
      throw std::invalid_argument("count_variance: length " + std::to_string(len) +
                                  " exceeds half the circumference");
    }
  }
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    for (double t : offsets) {
      const auto c = static_cast<double>(count_in_arc(config, t, lengths[i]));
      sum[i] += c;
      sum_sq[i] += c * c;
    }
  }
  observations += offsets.size();
}

void CountMoments::merge(const CountMoments& other) {
  if (other.lengths != lengths) throw std::invalid_argument("CountMoments::merge: length grids differ");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    sum[i] += other.sum[i];
    sum_sq[i] += other.sum_sq[i];
  }
  observations += other.observations;
}

std::vector<std::pair<double, double>> CountMoments::variances() const {
  std::vector<std::pair<double, double>> out;
  const auto nobs = static_cast<double>(observations);
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    double var = 0.0;
    if (observations > 1) var = (sum_sq[i] - sum[i] * sum[i] / nobs) / (nobs - 1.0);
    out.emplace_back(lengths[i], std::max(var, 0.0));
  }
  return out;
}

std::vector<std::pair<double, double>> count_variance(std::span<const RescaledConfig> samples,
                                                      std::span<const double> lengths,
                                                      int translations, std::uint64_t seed) {
  require_samples(samples, "count_variance");
  if (translations < 1) throw std::invalid_argument("count_variance: translations must be >= 1");
  CountMoments moments(lengths);
  std::vector<double> offsets(translations);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    RngStream rng(seed, s);
    const double L = samples[s].circumference;
    for (double& t : offsets) t = (rng.uniform() - 0.5) * L;
    moments.add(samples[s], offsets);
  }
  return moments.variances();
}

}  // namespace tensorcue
