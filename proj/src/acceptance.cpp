#include "tensorcue/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "tensorcue/combinatorics.hpp"
#include "tensorcue/experiment.hpp"
#include "tensorcue/gof.hpp"
#include "tensorcue/kernels.hpp"
#include "tensorcue/sampler.hpp"

namespace tensorcue {

namespace {

constexpr std::uint64_t kSeedBase = 20240917;

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

ExperimentConfig base_config(Mode mode, std::vector<int> dims, std::uint64_t samples,
                             std::uint64_t seed, int workers) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.dims = std::move(dims);
  cfg.n_samples = samples;
  cfg.seed = seed;
  cfg.delta_max = 4.0;
  cfg.n_bins = 40;
  cfg.window_half_width = 2.0;
  cfg.workers = workers;
  return cfg;
}

CriterionResult sine_limit(int workers) {
  CriterionResult r{1, "single-matrix sampler matches the sine pair correlation", false, {}};
  const auto res = run_experiment(base_config(Mode::single, {30}, 4000, kSeedBase + 1, workers));
  r.passed = res.limit_fit.rms_dev < 0.03 && res.limit_fit.n_bins_over_4sigma == 0;
  r.detail = fmt("m=30 N=4000: rms=%.4f (<0.03), bins beyond 4 SE=%d (=0)", res.limit_fit.rms_dev,
                 res.limit_fit.n_bins_over_4sigma);
  return r;
}

CriterionResult fixed_m_limit(int workers) {
  CriterionResult r{2, "tensor process with m fixed matches superposed sines", false, {}};
  const auto a = run_experiment(base_config(Mode::pair, {2, 40}, 5000, kSeedBase + 2, workers));
  const auto b = run_experiment(base_config(Mode::pair, {3, 30}, 5000, kSeedBase + 3, workers));
  r.passed = a.limit_fit.rms_dev < 0.03 && b.limit_fit.rms_dev < 0.03;
  r.detail = fmt("m=2,n=40: rms=%.4f; m=3,n=30: rms=%.4f (both <0.03)", a.limit_fit.rms_dev,
                 b.limit_fit.rms_dev);
  return r;
}

CriterionResult fixed_m_convergence(int workers) {
  CriterionResult r{3, "rms deviation from the m=2 limit is non-increasing in n", false, {}};
  int monotone = 0;
  std::ostringstream detail;
  for (int rep = 0; rep < 3; ++rep) {
    auto cfg = base_config(Mode::pair, {2, 10}, 5000, kSeedBase + 30 + rep, workers);
    const auto rows = run_convergence_sweep(cfg, {10, 20, 40});
    bool ok = true;
    detail << (rep ? "; " : "") << "rep" << rep << ":";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail << fmt(" %.4f", rows[i].rms_dev);
      if (i > 0 && rows[i].rms_dev > rows[i - 1].rms_dev) ok = false;
    }
    monotone += ok ? 1 : 0;
  }
  r.passed = monotone >= 2;
  r.detail = fmt("%d/3 repetitions non-increasing (need 2) [", monotone) + detail.str() + "]";
  return r;
}

CriterionResult poisson_limit(int workers) {
  CriterionResult r{4, "m=n=24 tensor process is close to Poisson", false, {}};
  std::ostringstream detail;
  bool rms_ok = false;
  bool var_ok = true;
  int ks_pass = 0;
  for (int rep = 0; rep < 5; ++rep) {
    auto cfg = base_config(Mode::pair, {24, 24}, 5000, kSeedBase + 40 + rep, workers);
    const auto res = run_experiment(cfg);
    ks_pass += res.spacing_ks.pass ? 1 : 0;
    if (rep == 0) {
      const auto fit = compare_to_curve(res.bundle.pair, [](double) { return 1.0; },
                                        CurveSampling::bin_average);
      rms_ok = fit.rms_dev < 0.05;
      detail << fmt("pair rms=%.4f (<0.05); variance", fit.rms_dev);
      for (const auto& [len, var] : res.bundle.count_var) {
        const double rel = std::abs(var - len) / len;
        if (rel > 0.15) var_ok = false;
        detail << fmt(" l=%g:%.3f(%.1f%%)", len, var, 100.0 * rel);
      }
      detail << " (within 15%)";
    }
    detail << fmt("; KS%d D=%.4f/%.4f", rep, res.spacing_ks.d_statistic, res.spacing_ks.threshold_05);
  }
  detail << fmt("; KS passes %d/5 (need 4)", ks_pass);
  r.passed = rms_ok && var_ok && ks_pass >= 4;
  r.detail = detail.str();
  return r;
}

CriterionResult triple_product(int workers) {
  CriterionResult r{5, "triple product l=2, m=n=16 is close to Poisson", false, {}};
  const auto res = run_experiment(base_config(Mode::triple, {2, 16, 16}, 4000, kSeedBase + 5, workers));
  r.passed = res.limit_fit.rms_dev < 0.06;
  r.detail = fmt("rms vs 1 = %.4f (<0.06)", res.limit_fit.rms_dev);
  return r;
}

CriterionResult poissonization() {
  CriterionResult r{6, "superposed sines at (0,1,2) approach 1 monotonically in m", false, {}};
  const std::vector<double> pts{0.0, 1.0, 2.0};
  std::ostringstream detail;
  double prev = 0.0;
  bool monotone = true;
  double last = 0.0;
  for (int m = 1; m <= 256; m *= 2) {
    const double dev = std::abs(rho_superposed_sine(m, pts) - 1.0);
    if (m > 1 && !(dev < prev)) monotone = false;
    detail << fmt("%sm=%d:%.4g", m == 1 ? "" : " ", m, dev);
    prev = dev;
    last = dev;
  }
  r.passed = monotone && last < 2e-2;
  r.detail = fmt("|rho-1| at m=256 = %.4g (<0.02), strictly decreasing=%s [", last,
                 monotone ? "yes" : "no") + detail.str() + "]";
  return r;
}

CriterionResult exact_combinatorics() {
  CriterionResult r{7, "Bell counts and the Stirling identity are exact", false, {}};
  const std::uint64_t bell[] = {1, 2, 5, 15, 52, 203, 877, 4140};
  bool ok = true;
  for (int k = 1; k <= 8; ++k) {
    if (set_partitions(k).size() != bell[k - 1]) ok = false;
  }
  double worst = 0.0;
  for (int k = 1; k <= 8; ++k) {
    for (int x = 0; x <= 10; ++x) worst = std::max(worst, stirling_identity_residual(k, x));
  }
  r.passed = ok && worst == 0.0;
  r.detail = fmt("Bell(1..8) %s; max Stirling residual = %g", ok ? "match" : "MISMATCH", worst);
  return r;
}

CriterionResult hadamard() {
  CriterionResult r{8, "Hadamard bound and sup-norm of the CUE kernel", false, {}};
  std::mt19937_64 gen(kSeedBase + 8);
  std::uniform_int_distribution<int> n_dist(1, 50);
  std::uniform_real_distribution<double> x_dist(0.0, 2.0 * std::numbers::pi);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const int n = n_dist(gen);
    const int k = std::uniform_int_distribution<int>(1, std::min(5, n))(gen);
    std::vector<double> pts(k);
    for (double& x : pts) x = x_dist(gen);
    const double rho = rho_cue<double>(n, pts);
    const double bound = hadamard_bound(k, n);
    if (rho > bound + 1e-9) ++violations;
    worst_ratio = std::max(worst_ratio, rho / bound);
  }
  double worst_kernel = 0.0;
  for (int n = 1; n <= 64; ++n) {
    for (int i = -20000; i <= 20000; ++i) {
      const double u = 10.0 * std::numbers::pi * i / 20000.0;
      worst_kernel = std::max(worst_kernel, std::abs(2.0 * std::numbers::pi / n * cue_s(n, u)));
    }
  }
  r.passed = violations == 0 && worst_kernel <= 1.0 + 1e-12;
  r.detail = fmt("%d/10000 bound violations, max rho/bound=%.4f; max |2pi/n s_n| = %.15f", violations,
                 worst_ratio, worst_kernel);
  return r;
}

CriterionResult estimator_oracle(int workers) {
  CriterionResult r{9, "estimator oracles, merge invariance, partition-sum routes", false, {}};
  // Independent generator: std::mt19937_64 with standard distributions.
  std::mt19937_64 gen(kSeedBase + 9);
  const double L = 200.0;
  std::poisson_distribution<int> count(L);
  std::uniform_real_distribution<double> pos(-0.5 * L, 0.5 * L);
  std::vector<RescaledConfig> samples(2000);
  for (auto& c : samples) {
    c.circumference = L;
    c.points.resize(count(gen));
    for (double& x : c.points) x = pos(gen);
    std::sort(c.points.begin(), c.points.end());
  }
  auto h = estimate_pair_correlation(samples, 4.0, 40);
  const auto fit = compare_to_curve(h, [](double) { return 1.0; });
  const bool oracle_ok = fit.n_bins_over_4sigma == 0;

  auto partial = make_pair_histogram(L, 4.0, 40);
  std::vector<CorrelationHistogram> parts(4, partial);
  for (std::size_t s = 0; s < samples.size(); ++s) accumulate_pairs(parts[s % 4], samples[s], s);
  auto merged = merge(merge(parts[3], parts[1]), merge(parts[2], parts[0]));
  const bool merge_ok = merged.counts == h.counts && merged.estimate == h.estimate &&
                        merged.batch_counts == h.batch_counts;

  auto cfg = base_config(Mode::pair, {3, 12}, 300, kSeedBase + 90, 1);
  const auto serial = run_experiment(cfg);
  cfg.workers = std::max(3, workers);
  const auto parallel = run_experiment(cfg);
  const bool parallel_ok = serial.bundle.pair.counts == parallel.bundle.pair.counts &&
                           serial.bundle.pair.estimate == parallel.bundle.pair.estimate &&
                           serial.bundle.spacings.spacings == parallel.bundle.spacings.spacings &&
                           serial.bundle.count_var == parallel.bundle.count_var;

  double worst = 0.0;
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (int t = 0; t < 500; ++t) {
    const int k = 1 + t % 6;
    const int m = 1 + static_cast<int>(gen() % 9);
    std::vector<double> pts(k);
    for (double& x : pts) x = coord(gen);
    worst = std::max(worst, std::abs(rho_superposed_sine(m, pts) -
                                     detail::rho_superposed_sine_by_insertion(m, pts)));
  }
  r.passed = oracle_ok && merge_ok && parallel_ok && worst <= 1e-12;
  r.detail = fmt("Poisson oracle bins>4SE=%d; merge %s; workers 1 vs %d %s; partition routes max diff=%.2g",
                 fit.n_bins_over_4sigma, merge_ok ? "exact" : "DIFFERS", cfg.workers,
                 parallel_ok ? "identical" : "DIFFER", worst);
  return r;
}

CriterionResult haar_moments() {
  CriterionResult r{10, "Haar moments and marginal uniformity of eigenphases", false, {}};
  std::ostringstream detail;
  bool ok = true;
  for (int n : {2, 10, 30}) {
    const int samples = 10000;
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(samples) * n);
    for (int s = 0; s < samples; ++s) {
      RngStream rng(kSeedBase + 10 + n, s);
      const Eigen::MatrixXcd u = sample_haar_unitary(n, rng);
      const double t = std::norm(u.trace());
      sum += t;
      sum_sq += t * t;
      const PhaseVector ph = eigenphases(u);
      pooled.insert(pooled.end(), ph.begin(), ph.end());
    }
    const double mean = sum / samples;
    const double var = (sum_sq - sum * sum / samples) / (samples - 1);
    const double se = std::sqrt(var / samples);
    const auto chi = chi_square_uniformity(pooled, 32);
    const double p = chi_square_p_value(chi);
    const bool pass = std::abs(mean - 1.0) <= 4.0 * se && p > 0.01;
    ok = ok && pass;
    detail << fmt("%sn=%d: E|TrU|^2=%.4f+-%.4f, chi2=%.1f p=%.3f", n == 2 ? "" : "; ", n, mean, se,
                  chi.statistic, p);
  }
  r.passed = ok;
  r.detail = detail.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& opts) {
  const int w = std::max(1, opts.workers);
  const std::vector<std::function<CriterionResult()>> criteria = {
      [&] { return sine_limit(w); },       [&] { return fixed_m_limit(w); },
      [&] { return fixed_m_convergence(w); }, [&] { return poisson_limit(w); },
      [&] { return triple_product(w); },   [] { return poissonization(); },
      [] { return exact_combinatorics(); }, [] { return hadamard(); },
      [&] { return estimator_oracle(w); }, [] { return haar_moments(); },
  };
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) {
      continue;
    }
    CriterionResult r = criteria[i]();
    if (opts.on_result) opts.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result_line(const CriterionResult& r) {
  return fmt("[%s] criterion %2d: %s -- ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str()) + r.detail;
}

}  // namespace tensorcue
