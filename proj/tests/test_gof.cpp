#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tensorcue/gof.hpp"

using namespace tensorcue;

namespace {

CorrelationHistogram poisson_histogram(std::uint64_t seed, int samples, double L) {
  std::mt19937_64 gen(seed);
  std::poisson_distribution<int> n(L);
  std::uniform_real_distribution<double> x(-0.5 * L, 0.5 * L);
  auto h = make_pair_histogram(L, 4.0, 20, 20);
  for (int s = 0; s < samples; ++s) {
    RescaledConfig c;
    c.circumference = L;
    c.points.resize(n(gen));
    for (double& p : c.points) p = x(gen);
    std::sort(c.points.begin(), c.points.end());
    accumulate_pairs(h, c, s);
  }
  refresh_estimate(h);
  return h;
}

SpacingHistogram exponential_sample(std::mt19937_64& gen, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> s(n);
  for (double& v : s) v = e(gen);
  return spacing_histogram(std::move(s), 0.1, 1.0);
}

}  // namespace

TEST_CASE("compare_to_curve on exact and constant data") {
  auto h = poisson_histogram(1, 200, 50.0);
  const auto est = h.estimate;
  const auto exact = compare_to_curve(h, [&](double d) {
    const auto b = static_cast<std::size_t>(d / 0.2);
    return est[std::min(b, est.size() - 1)];
  });
  CHECK(exact.max_abs_dev == 0.0);
  CHECK(exact.rms_dev == 0.0);

  // Force a flat histogram equal to 1 by construction of the counts.
  auto flat = h;
  for (std::size_t b = 0; b < flat.n_bins(); ++b) {
    flat.counts[b] = static_cast<double>(flat.n_samples) * 2.0 * flat.circumference * flat.bin_width(b);
  }
  refresh_estimate(flat);
  const auto c = compare_to_curve(flat, [](double) { return 1.0; });
  CHECK(c.rms_dev == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(c.rms_dev <= c.max_abs_dev + 1e-15);
}

TEST_CASE("compare_to_curve requires error bars") {
  auto h = make_pair_histogram(20.0, 4.0, 10, 5);
  CHECK_THROWS_AS(compare_to_curve(h, [](double) { return 1.0; }), std::invalid_argument);
}

TEST_CASE("compare_to_curve is invariant under scaling counts and samples together") {
  auto h = poisson_histogram(2, 300, 40.0);
  auto scaled = h;
  scaled.n_samples *= 4;
  for (auto& c : scaled.counts) c *= 4.0;
  for (auto& row : scaled.batch_counts) {
    for (auto& c : row) c *= 4.0;
  }
  for (auto& s : scaled.batch_samples) s *= 4;
  refresh_estimate(scaled);
  const auto a = compare_to_curve(h, [](double) { return 1.0; });
  const auto b = compare_to_curve(scaled, [](double) { return 1.0; });
  CHECK(a.rms_dev == doctest::Approx(b.rms_dev).epsilon(1e-12));
  for (std::size_t i = 0; i < a.per_bin_z.size(); ++i) {
    CHECK(a.per_bin_z[i] == doctest::Approx(b.per_bin_z[i]).epsilon(1e-12));
  }
}

TEST_CASE("bin averaging differs from the midpoint rule only for curved targets") {
  auto h = poisson_histogram(3, 100, 40.0);
  const auto lin_mid = compare_to_curve(h, [](double d) { return 0.9 + 0.02 * d; });
  const auto lin_avg = compare_to_curve(h, [](double d) { return 0.9 + 0.02 * d; }, CurveSampling::bin_average);
  CHECK(lin_mid.rms_dev == doctest::Approx(lin_avg.rms_dev).epsilon(1e-12));
  CHECK(curve_bin_average([](double x) { return x * x; }, 0.0, 0.1) == doctest::Approx(0.01 / 3.0).epsilon(1e-14));
}

TEST_CASE("Poisson histograms rarely show a 4-sigma bin against 1") {
  int clean = 0;
  const int reps = 60;
  for (int r = 0; r < reps; ++r) {
    const auto h = poisson_histogram(100 + r, 200, 60.0);
    if (compare_to_curve(h, [](double) { return 1.0; }).n_bins_over_4sigma == 0) ++clean;
  }
  CHECK(clean >= static_cast<int>(0.95 * reps));
}

TEST_CASE("KS against the exponential law") {
  std::vector<double> ones(500, 1.0);
  const auto lattice = spacing_histogram(ones, 0.1);
  const auto r = ks_against_exponential(lattice);
  CHECK(r.d_statistic == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK_FALSE(r.pass);

  std::vector<double> few(50, 1.0);
  CHECK_THROWS_AS(ks_against_exponential(spacing_histogram(few, 0.1)), std::invalid_argument);

  SpacingHistogram raw;
  raw.spacings.assign(200, 1.0);
  CHECK_THROWS_AS(ks_against_exponential(raw), std::invalid_argument);
}

TEST_CASE("KS is permutation invariant and has its nominal size") {
  std::mt19937_64 gen(17);
  auto h = exponential_sample(gen, 300);
  const double d = ks_against_exponential(h).d_statistic;
  std::shuffle(h.spacings.begin(), h.spacings.end(), gen);
  CHECK(ks_against_exponential(h).d_statistic == d);

  int rejections = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    if (!ks_against_exponential(exponential_sample(gen, 200)).pass) ++rejections;
  }
  CHECK(std::abs(rejections / double(reps) - 0.05) <= 0.03);
}

TEST_CASE("chi-square uniformity statistics") {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> even;
  for (int i = 0; i < 320; ++i) even.push_back(two_pi * (i + 0.5) / 320.0);
  const auto e = chi_square_uniformity(even, 32);
  CHECK(e.statistic == doctest::Approx(0.0).scale(1.0));
  CHECK(e.dof == 31);

  std::vector<double> lump(640, 0.01);
  const auto l = chi_square_uniformity(lump, 32);
  CHECK(l.statistic == doctest::Approx(640.0 * 31.0));
  CHECK(chi_square_p_value(l) < 1e-10);

  std::vector<double> sparse(100, 1.0);
  CHECK_THROWS_AS(chi_square_uniformity(sparse, 32), std::invalid_argument);

  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, two_pi);
  std::vector<double> sample(6400);
  for (double& v : sample) v = u(gen);
  const auto s = chi_square_uniformity(sample, 32);
  const double band = 4.0 * std::sqrt(2.0 * s.dof);
  CHECK(s.statistic > s.dof - band);
  CHECK(s.statistic < s.dof + band);
}

TEST_CASE("chi-square rejection rate matches the nominal level") {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  int rejections = 0;
  const int reps = 1000;
  std::vector<double> sample(640);
  for (int r = 0; r < reps; ++r) {
    for (double& v : sample) v = u(gen);
    if (chi_square_p_value(chi_square_uniformity(sample, 32)) < 0.05) ++rejections;
  }
  CHECK(std::abs(rejections / double(reps) - 0.05) <= 0.03);
}
