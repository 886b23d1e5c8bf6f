#include "tensorcue/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tensorcue/combinatorics.hpp"
#include "tensorcue/errors.hpp"

namespace tensorcue {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  T value{};
  try {
    if constexpr (std::is_same_v<T, double>) {
      value = std::stod(s, &used);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!s.empty() && s.front() == '-') throw std::invalid_argument("negative");
      value = std::stoull(s, &used);
    } else {
      value = static_cast<T>(std::stoi(s, &used));
    }
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw std::invalid_argument("config key '" + std::string(key) + "': cannot parse '" + s + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find_first_of(",x", start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    out.push_back(parse_number<T>(key, piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string dims_label(const std::vector<int>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(dims[i]);
  }
  return out;
}

struct WorkerPartial {
  CorrelationHistogram pair;
  CountMoments moments;
  std::uint64_t points = 0;
  std::vector<std::uint64_t> streams;
};

// Exponential density averaged over [a, b].
double exp_bin_average(double a, double b) { return (std::exp(-a) - std::exp(-b)) / (b - a); }

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::single: return "single";
    case Mode::pair: return "pair";
    case Mode::triple: return "triple";
  }
  return "pair";
}

Mode parse_mode(std::string_view text) {
  text = trim(text);
  if (text == "single") return Mode::single;
  if (text == "pair") return Mode::pair;
  if (text == "triple") return Mode::triple;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (single, pair, triple)");
}

std::size_t factor_product(const ExperimentConfig& cfg) {
  std::size_t p = 1;
  for (int d : cfg.dims) p *= static_cast<std::size_t>(d);
  return p;
}

void validate(const ExperimentConfig& cfg) {
  const std::size_t expected = cfg.mode == Mode::single ? 1 : cfg.mode == Mode::pair ? 2 : 3;
  if (cfg.dims.size() != expected) {
    throw std::invalid_argument("mode " + std::string(to_string(cfg.mode)) + " needs " +
                                std::to_string(expected) + " dims, got " +
                                std::to_string(cfg.dims.size()));
  }
  for (int d : cfg.dims) {
    if (d < 1) throw std::invalid_argument("dims must be positive");
    if (d > SamplerOptions{}.max_dim) throw capacity_error("dimension " + std::to_string(d) + " exceeds sampler cap");
  }
  const double L = static_cast<double>(factor_product(cfg));
  if (cfg.n_samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (!(cfg.delta_max > 0.0) || cfg.delta_max > 0.5 * L) {
    throw std::invalid_argument("delta_max must lie in (0, " + format_real(0.5 * L) + "]");
  }
  if (cfg.n_bins < 4) throw std::invalid_argument("bins must be >= 4");
  if (!(cfg.window_half_width > 0.0) || 2.0 * cfg.window_half_width > L) {
    throw std::invalid_argument("window half-width must lie in (0, " + format_real(0.5 * L) + "]");
  }
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (cfg.k_analytic < 1 || cfg.k_analytic > 8) throw std::invalid_argument("k_analytic must lie in [1, 8]");
  if (cfg.n_batches < 2) throw std::invalid_argument("batches must be >= 2");
  if (cfg.translations < 1) throw std::invalid_argument("translations must be >= 1");
  if (!(cfg.spacing_bin_width > 0.0)) throw std::invalid_argument("spacing_bin must be positive");
  for (double len : cfg.count_lengths) {
    if (!(len > 0.0) || len > 0.5 * L) {
      throw std::invalid_argument("count length " + format_real(len) + " outside (0, L/2]");
    }
  }
}

int default_worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "mode") cfg.mode = parse_mode(value);
  else if (key == "dims") cfg.dims = parse_list<int>(key, value);
  else if (key == "samples") cfg.n_samples = parse_number<std::uint64_t>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "delta_max") cfg.delta_max = parse_number<double>(key, value);
  else if (key == "bins") cfg.n_bins = parse_number<int>(key, value);
  else if (key == "window") cfg.window_half_width = parse_number<double>(key, value);
  else if (key == "workers") cfg.workers = parse_number<int>(key, value);
  else if (key == "k_analytic") cfg.k_analytic = parse_number<int>(key, value);
  else if (key == "batches") cfg.n_batches = parse_number<int>(key, value);
  else if (key == "lengths") cfg.count_lengths = parse_list<double>(key, value);
  else if (key == "translations") cfg.translations = parse_number<int>(key, value);
  else if (key == "spacing_bin") cfg.spacing_bin_width = parse_number<double>(key, value);
  else if (key == "out") cfg.output_dir = std::string(value);
  else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
      }
      apply_config_entry(base, line.substr(0, eq), line.substr(eq + 1));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return base;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(cfg.mode);
  j["dims"] = cfg.dims;
  j["samples"] = cfg.n_samples;
  j["seed"] = cfg.seed;
  j["delta_max"] = cfg.delta_max;
  j["bins"] = cfg.n_bins;
  j["window"] = cfg.window_half_width;
  j["workers"] = cfg.workers;
  j["k_analytic"] = cfg.k_analytic;
  j["batches"] = cfg.n_batches;
  j["lengths"] = cfg.count_lengths;
  j["translations"] = cfg.translations;
  j["spacing_bin"] = cfg.spacing_bin_width;
  j["out"] = cfg.output_dir.string();
  return j;
}

ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") cfg.mode = parse_mode(value.get<std::string>());
    else if (key == "dims") cfg.dims = value.get<std::vector<int>>();
    else if (key == "samples") cfg.n_samples = value.get<std::uint64_t>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "delta_max") cfg.delta_max = value.get<double>();
    else if (key == "bins") cfg.n_bins = value.get<int>();
    else if (key == "window") cfg.window_half_width = value.get<double>();
    else if (key == "workers") cfg.workers = value.get<int>();
    else if (key == "k_analytic") cfg.k_analytic = value.get<int>();
    else if (key == "batches") cfg.n_batches = value.get<int>();
    else if (key == "lengths") cfg.count_lengths = value.get<std::vector<double>>();
    else if (key == "translations") cfg.translations = value.get<int>();
    else if (key == "spacing_bin") cfg.spacing_bin_width = value.get<double>();
    else if (key == "out") cfg.output_dir = value.get<std::string>();
    else throw std::invalid_argument("unknown config key '" + key + "' in manifest");
  }
  return cfg;
}

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["tool"] = "tensorcue";
  j["version"] = manifest.version;
  j["config"] = config_to_json(manifest.config);
  j["started"] = manifest.started;
  j["finished"] = manifest.finished;
  j["stream_policy"] = "sample s uses stream_id s with the configured seed";
  nlohmann::ordered_json workers = nlohmann::ordered_json::array();
  for (std::size_t w = 0; w < manifest.worker_streams.size(); ++w) {
    workers.push_back({{"worker", w}, {"stream_ids", manifest.worker_streams[w]}});
  }
  j["workers"] = std::move(workers);
  j["outputs"] = manifest.outputs;
  j["summary"] = manifest.summary;
  return j;
}

std::vector<PhaseVector> sample_factors(const ExperimentConfig& cfg, RngStream& rng) {
  std::vector<PhaseVector> factors;
  factors.reserve(cfg.dims.size());
  for (int d : cfg.dims) factors.push_back(sample_cue_phases(d, rng));
  return factors;
}

RescaledConfig combine_factors(const std::vector<PhaseVector>& factors) {
  switch (factors.size()) {
    case 1: return rescale_center(factors[0], factors[0].size());
    case 2: {
      PhaseVector t = tensor_phases(factors[0], factors[1]);
      return rescale_center(t, t.size());
    }
    case 3: {
      PhaseVector t = triple_tensor(factors[0], factors[1], factors[2]);
      return rescale_center(t, t.size());
    }
    default: throw std::invalid_argument("combine_factors: need 1 to 3 factors");
  }
}

double limit_pair_correlation(const ExperimentConfig& cfg, double delta) {
  switch (cfg.mode) {
    case Mode::single: return rho_superposed_pair(1, delta);
    case Mode::pair: return rho_superposed_pair(cfg.dims.at(0), delta);
    case Mode::triple: return rho_poisson(2);
  }
  return 1.0;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentResult result;
  RunManifest& manifest = result.manifest;
  manifest.config = cfg;
  manifest.started = timestamp_now();

  const std::size_t product = factor_product(cfg);
  const double L = static_cast<double>(product);
  const std::uint64_t total = cfg.n_samples;
  std::vector<double> typical_gaps(total, 0.0);

  const int workers = static_cast<int>(std::min<std::uint64_t>(cfg.workers, total));
  std::vector<WorkerPartial> partials;
  partials.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    partials.push_back({make_pair_histogram(L, cfg.delta_max, cfg.n_bins, cfg.n_batches),
                        CountMoments(cfg.count_lengths), 0, {}});
  }

  std::atomic<std::uint64_t> next{0};
  auto work = [&](WorkerPartial& part) {
    std::vector<double> offsets(cfg.translations);
    for (std::uint64_t s = next.fetch_add(1); s < total; s = next.fetch_add(1)) {
      RngStream rng(cfg.seed, s);
      const RescaledConfig config = combine_factors(sample_factors(cfg, rng));
      accumulate_pairs(part.pair, config, s);
      for (double& t : offsets) t = (rng.uniform() - 0.5) * L;
      part.moments.add(config, offsets);
      // Gap following a uniformly chosen point: one Palm-typical spacing per sample.
      const auto gaps = circular_gaps(config);
      const auto pick = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * gaps.size()),
                                              gaps.size() - 1);
      typical_gaps[s] = gaps.empty() ? 0.0 : gaps[pick];
      part.points += config.size();
      part.streams.push_back(s);
    }
  };

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(partials[w]);
        } catch (...) {
          errors[w] = std::current_exception();
          next.store(total);
        }
      });
    }
    try {
      work(partials[0]);
    } catch (...) {
      errors[0] = std::current_exception();
      next.store(total);
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CorrelationHistogram pair = make_pair_histogram(L, cfg.delta_max, cfg.n_bins, cfg.n_batches);
  CountMoments moments(cfg.count_lengths);
  std::uint64_t points = 0;
  for (auto& part : partials) {
    pair = merge(pair, part.pair);
    moments.merge(part.moments);
    points += part.points;
    manifest.worker_streams.push_back(std::move(part.streams));
  }

  EstimateBundle& bundle = result.bundle;
  bundle.intensity = static_cast<double>(points) / (static_cast<double>(total) * L);
  bundle.pair = std::move(pair);
  bundle.spacings = spacing_histogram(std::move(typical_gaps), cfg.spacing_bin_width, 1.0);
  bundle.count_var = moments.variances();

  result.limit_fit = compare_to_curve(
      bundle.pair, [&](double d) { return limit_pair_correlation(cfg, d); },
      CurveSampling::bin_average);
  if (bundle.spacings.spacings.size() >= kMinKsSample) {
    result.spacing_ks = ks_against_exponential(bundle.spacings);
  }

  auto& summary = manifest.summary;
  summary["intensity"] = bundle.intensity;
  summary["pair_rms_vs_limit"] = result.limit_fit.rms_dev;
  summary["pair_max_abs_vs_limit"] = result.limit_fit.max_abs_dev;
  summary["pair_bins_over_4sigma"] = result.limit_fit.n_bins_over_4sigma;
  summary["spacing_ks_d"] = result.spacing_ks.d_statistic;
  summary["spacing_ks_threshold_05"] = result.spacing_ks.threshold_05;
  summary["spacing_ks_pass"] = result.spacing_ks.pass;
  nlohmann::ordered_json var = nlohmann::ordered_json::array();
  for (const auto& [len, v] : bundle.count_var) var.push_back({{"length", len}, {"variance", v}});
  summary["count_variance"] = std::move(var);

  if (!cfg.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw io_error("cannot create " + cfg.output_dir.string() + ": " + ec.message());
    const std::string pre = csv_preamble(cfg);
    const auto se = bundle.pair.standard_errors();

    std::string pair_csv = pre + "delta_lo,delta_hi,delta_mid,count,estimate,std_error,limit_bin_average\n";
    auto limit = [&](double d) { return limit_pair_correlation(cfg, d); };
    for (std::size_t b = 0; b < bundle.pair.n_bins(); ++b) {
      const double lo = bundle.pair.bin_edges[b];
      const double hi = bundle.pair.bin_edges[b + 1];
      pair_csv += format_real(lo) + ',' + format_real(hi) + ',' + format_real(bundle.pair.midpoint(b)) +
                  ',' + format_real(bundle.pair.counts[b]) + ',' + format_real(bundle.pair.estimate[b]) +
                  ',' + format_real(se[b]) + ',' + format_real(curve_bin_average(limit, lo, hi)) + '\n';
    }
    const auto pair_path = cfg.output_dir / "pair_correlation.csv";
    write_text_file(pair_path, pair_csv);

    std::string spacing_csv = pre + "s_lo,s_hi,count,density,exponential_bin_average\n";
    const auto density = bundle.spacings.density();
    for (std::size_t b = 0; b < bundle.spacings.counts.size(); ++b) {
      const double lo = bundle.spacings.bin_edges[b];
      const double hi = bundle.spacings.bin_edges[b + 1];
      spacing_csv += format_real(lo) + ',' + format_real(hi) + ',' + format_real(bundle.spacings.counts[b]) +
                     ',' + format_real(density[b]) + ',' + format_real(exp_bin_average(lo, hi)) + '\n';
    }
    const auto spacing_path = cfg.output_dir / "spacings.csv";
    write_text_file(spacing_path, spacing_csv);

    std::string var_csv = pre + "length,variance,poisson_variance\n";
    for (const auto& [len, v] : bundle.count_var) {
      var_csv += format_real(len) + ',' + format_real(v) + ',' + format_real(len) + '\n';
    }
    const auto var_path = cfg.output_dir / "count_variance.csv";
    write_text_file(var_path, var_csv);

    std::vector<double> grid(cfg.n_bins);
    for (int i = 0; i < cfg.n_bins; ++i) grid[i] = bundle.pair.midpoint(i);
    const CurveKind kind = cfg.mode == Mode::single ? CurveKind::sine_pair
                           : cfg.mode == Mode::pair ? CurveKind::superposed_pair
                                                    : CurveKind::poisson;
    const auto ref_path = cfg.output_dir / "reference_curve.csv";
    emit_reference_curve(kind, cfg.dims[0], grid, ref_path, cfg.k_analytic);

    manifest.outputs = {pair_path.string(), spacing_path.string(), var_path.string(), ref_path.string()};
  }

  manifest.finished = timestamp_now();
  if (!cfg.output_dir.empty()) {
    const auto manifest_path = cfg.output_dir / "manifest.json";
    manifest.outputs.push_back(manifest_path.string());
    write_text_file(manifest_path, manifest_to_json(manifest).dump(2) + '\n');
  }
  return result;
}

std::vector<SweepRow> run_convergence_sweep(const ExperimentConfig& base,
                                            const std::vector<int>& n_values) {
  if (n_values.empty()) throw std::invalid_argument("sweep: n_values is empty");
  if (!std::is_sorted(n_values.begin(), n_values.end())) {
    throw std::invalid_argument("sweep: n_values must be ascending");
  }
  if (base.mode != Mode::pair || base.dims.empty()) {
    throw std::invalid_argument("sweep: requires pair mode");
  }
  std::vector<SweepRow> rows;
  for (int n : n_values) {
    ExperimentConfig cfg = base;
    cfg.dims = {base.dims[0], n};
    cfg.output_dir.clear();
    const ExperimentResult r = run_experiment(cfg);
    rows.push_back({n, r.limit_fit.rms_dev, r.limit_fit.max_abs_dev, r.limit_fit.n_bins_over_4sigma});
  }
  return rows;
}

CurveKind parse_curve_kind(std::string_view text) {
  text = trim(text);
  if (text == "sine_pair" || text == "sine") return CurveKind::sine_pair;
  if (text == "superposed_pair" || text == "superposed") return CurveKind::superposed_pair;
  if (text == "poisson") return CurveKind::poisson;
  throw std::invalid_argument("unknown curve kind '" + std::string(text) +
                              "' (sine_pair, superposed_pair, poisson)");
}

std::vector<double> reference_curve(CurveKind kind, int m, std::span<const double> grid, int k) {
  if (k < 1 || k > 8) throw std::invalid_argument("reference_curve: k must lie in [1, 8]");
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument("reference_curve: grid must be ascending");
  }
  if (kind == CurveKind::superposed_pair && m < 1) {
    throw std::invalid_argument("reference_curve: m must be >= 1");
  }
  std::vector<double> out;
  out.reserve(grid.size());
  std::vector<double> ray(k);
  for (double d : grid) {
    for (int i = 0; i < k; ++i) ray[i] = i * d;
    switch (kind) {
      case CurveKind::sine_pair:
        out.push_back(k == 2 ? rho_superposed_pair(1, d) : rho_sine<double>(ray));
        break;
      case CurveKind::superposed_pair:
        out.push_back(k == 2 ? rho_superposed_pair(m, d) : rho_superposed_sine(m, ray));
        break;
      case CurveKind::poisson: out.push_back(rho_poisson(k)); break;
    }
  }
  return out;
}

void emit_reference_curve(CurveKind kind, int m, std::span<const double> grid,
                          const std::filesystem::path& path, int k) {
  const auto values = reference_curve(kind, m, grid, k);
  std::string csv = "# kind=" +
                    std::string(kind == CurveKind::sine_pair        ? "sine_pair"
                                : kind == CurveKind::superposed_pair ? "superposed_pair"
                                                                     : "poisson") +
                    " m=" + std::to_string(m) + " k=" + std::to_string(k) + "\ndelta,rho\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += format_real(grid[i]) + ',' + format_real(values[i]) + '\n';
  }
  write_text_file(path, csv);
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_preamble(const ExperimentConfig& cfg) {
  return "# tool=tensorcue version=" + std::string(kVersion) + "\n# mode=" +
         std::string(to_string(cfg.mode)) + " dims=" + dims_label(cfg.dims) +
         " n_samples=" + std::to_string(cfg.n_samples) + " seed=" + std::to_string(cfg.seed) +
         "\n# delta_max=" + format_real(cfg.delta_max) + " bins=" + std::to_string(cfg.n_bins) +
         " batches=" + std::to_string(cfg.n_batches) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw io_error("failed writing " + path.string());
}

}  // namespace tensorcue
