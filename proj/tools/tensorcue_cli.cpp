// tensorcue: command-line front end for the tensor-product eigenphase experiments.
//
// Exit codes: 0 ok, 1 invalid input, 2 runtime or I/O failure, 3 verify failed.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tensorcue/acceptance.hpp"
#include "tensorcue/errors.hpp"
#include "tensorcue/experiment.hpp"
#include "tensorcue/processes.hpp"
#include "tensorcue/rng.hpp"

namespace tc = tensorcue;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

const char* const kConfigHelp = R"(Config file keys (flat "key = value", '#' comments; flags win over the file):
  mode          single | pair | triple
  dims          factor dimensions, e.g. 30 or 2x40 or 2,3,4 (integers)
  samples       number of independent samples
  seed          64-bit seed; sample s uses stream s
  delta_max     largest pair distance, in units of the mean spacing
  bins          pair histogram bins (>= 4)
  window        window half-width, in mean spacings
  workers       worker threads
  k_analytic    order of the analytic reference curve (1..8)
  batches       batches for error bars (sample s goes to batch s mod batches)
  lengths       arc lengths for count variance, in mean spacings
  translations  random arc offsets per sample
  spacing_bin   spacing histogram bin width, in mean spacings
  out           output directory

Environment:
  TENSORCUE_WORKERS  default worker count when neither flag nor file sets one
)";

// Flags mirroring config keys; each applied through the config parser.
struct Overrides {
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    const std::pair<const char*, const char*> keys[] = {
        {"mode", "--mode"},          {"dims", "--dims"},
        {"samples", "--samples"},    {"seed", "--seed"},
        {"delta_max", "--delta-max"}, {"bins", "--bins"},
        {"window", "--window"},      {"workers", "--workers"},
        {"k_analytic", "--k-analytic"}, {"batches", "--batches"},
        {"lengths", "--lengths"},    {"translations", "--translations"},
        {"spacing_bin", "--spacing-bin"}, {"out", "--out"},
    };
    for (const auto& [key, flag] : keys) {
      app->add_option_function<std::string>(
          flag, [this, k = std::string(key)](const std::string& v) { values[k] = v; },
          "overrides config key '" + std::string(key) + "'");
    }
  }
};

struct RunSource {
  std::string config_file;
  std::string manifest_file;
  Overrides overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key = value config file");
    app->add_option("--from-manifest", manifest_file, "rerun the config echoed in a manifest.json");
    overrides.attach(app);
  }

  tc::ExperimentConfig build() const {
    tc::ExperimentConfig cfg;
    cfg.workers = tc::default_worker_count();
    if (!manifest_file.empty()) {
      std::ifstream in(manifest_file);
      if (!in) throw tc::io_error("cannot open manifest " + manifest_file);
      nlohmann::ordered_json j;
      try {
        j = nlohmann::ordered_json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("manifest " + manifest_file + ": " + e.what());
      }
      if (!j.contains("config")) throw std::invalid_argument("manifest " + manifest_file + " has no config");
      cfg = tc::config_from_json(j["config"]);
    }
    if (!config_file.empty()) cfg = tc::load_config_file(config_file, cfg);
    for (const auto& [k, v] : overrides.values) tc::apply_config_entry(cfg, k, v);
    tc::validate(cfg);
    return cfg;
  }
};

// "0:4:0.05" (start:stop:step, inclusive) or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, h = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> h) || c1 != ':' || c2 != ':' || !(h > 0.0) || b < a) {
      throw std::invalid_argument("grid must be start:stop:step with step > 0 and stop >= start");
    }
    const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    for (long i = 0; i <= n; ++i) grid.push_back(a + h * static_cast<double>(i));
    return grid;
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    grid.push_back(v);
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be ascending");
  }
  if (grid.empty()) throw std::invalid_argument("grid is empty");
  return grid;
}

void print_summary(const tc::ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["config"] = tc::config_to_json(r.manifest.config);
  j["summary"] = r.manifest.summary;
  j["outputs"] = r.manifest.outputs;
  std::cout << j.dump(2) << '\n';
}

int cmd_sample(const RunSource& src) {
  const auto cfg = src.build();
  const std::size_t product = tc::factor_product(cfg);
  std::string csv = tc::csv_preamble(cfg) + "sample,index,phase,theta\n";
  for (std::uint64_t s = 0; s < cfg.n_samples; ++s) {
    tc::RngStream rng(cfg.seed, s);
    const auto f = tc::sample_factors(cfg, rng);
    const tc::PhaseVector phases = f.size() == 1   ? f[0]
                                   : f.size() == 2 ? tc::tensor_phases(f[0], f[1])
                                                   : tc::triple_tensor(f[0], f[1], f[2]);
    const auto rescaled = tc::rescale_center(phases, product);
    // rescale_center sorts by theta, so pair the columns through the inverse map
    for (std::size_t i = 0; i < rescaled.points.size(); ++i) {
      const double theta = rescaled.points[i];
      const double x = tc::wrap_angle(theta * 2.0 * M_PI / static_cast<double>(product) + M_PI);
      csv += std::to_string(s) + ',' + std::to_string(i) + ',' + tc::format_real(x) + ',' +
             tc::format_real(theta) + '\n';
    }
  }
  if (cfg.output_dir.empty()) {
    std::cout << csv;
  } else {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw tc::io_error("cannot create " + cfg.output_dir.string() + ": " + ec.message());
    tc::write_text_file(cfg.output_dir / "phases.csv", csv);
    std::cerr << "wrote " << (cfg.output_dir / "phases.csv").string() << '\n';
  }
  return 0;
}

int cmd_correlate(const RunSource& src) {
  const auto r = tc::run_experiment(src.build());
  print_summary(r);
  if (r.manifest.config.output_dir.empty()) {
    const auto& h = r.bundle.pair;
    const auto se = h.standard_errors();
    std::cout << "delta_mid,estimate,std_error,limit\n";
    for (std::size_t b = 0; b < h.n_bins(); ++b) {
      std::cout << tc::format_real(h.midpoint(b)) << ',' << tc::format_real(h.estimate[b]) << ','
                << tc::format_real(se[b]) << ','
                << tc::format_real(tc::limit_pair_correlation(r.manifest.config, h.midpoint(b))) << '\n';
    }
  }
  return 0;
}

int cmd_spacings(const RunSource& src) {
  const auto r = tc::run_experiment(src.build());
  const auto& s = r.bundle.spacings;
  std::cout << "# spacings=" << s.n_spacings << " ks_d=" << tc::format_real(r.spacing_ks.d_statistic)
            << " ks_threshold_05=" << tc::format_real(r.spacing_ks.threshold_05)
            << " ks_pass=" << (r.spacing_ks.pass ? "true" : "false") << '\n';
  std::cout << "s_lo,s_hi,density\n";
  const auto dens = s.density();
  for (std::size_t b = 0; b < dens.size(); ++b) {
    std::cout << tc::format_real(s.bin_edges[b]) << ',' << tc::format_real(s.bin_edges[b + 1]) << ','
              << tc::format_real(dens[b]) << '\n';
  }
  return 0;
}

int cmd_sweep(const RunSource& src, const std::vector<int>& n_values) {
  auto cfg = src.build();
  const auto rows = tc::run_convergence_sweep(cfg, n_values);
  std::string csv = tc::csv_preamble(cfg) + "n,rms_dev,max_abs_dev,bins_over_4sigma\n";
  for (const auto& row : rows) {
    csv += std::to_string(row.n) + ',' + tc::format_real(row.rms_dev) + ',' + tc::format_real(row.max_abs_dev) +
           ',' + std::to_string(row.n_bins_over_4sigma) + '\n';
  }
  if (cfg.output_dir.empty()) {
    std::cout << csv;
  } else {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw tc::io_error("cannot create " + cfg.output_dir.string() + ": " + ec.message());
    tc::write_text_file(cfg.output_dir / "sweep.csv", csv);
  }
  return 0;
}

int cmd_refcurve(const std::string& kind, int m, int k, const std::string& grid_text, const std::string& file) {
  const auto curve = tc::parse_curve_kind(kind);
  const auto grid = parse_grid(grid_text);
  if (!file.empty()) {
    tc::emit_reference_curve(curve, m, grid, file, k);
    return 0;
  }
  const auto values = tc::reference_curve(curve, m, grid, k);
  std::cout << "delta,rho\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::cout << tc::format_real(grid[i]) << ',' << tc::format_real(values[i]) << '\n';
  }
  return 0;
}

int cmd_verify(int workers, const std::vector<int>& only) {
  tc::AcceptanceOptions opts;
  opts.workers = workers > 0 ? workers : tc::default_worker_count();
  opts.only = only;
  opts.on_result = [](const tc::CriterionResult& r) {
    std::cout << tc::format_result_line(r) << std::endl;
  };
  const auto results = tc::run_acceptance_suite(opts);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and analytic correlation functions of tensor products of Haar unitaries"};
  app.footer(kConfigHelp);
  app.set_version_flag("--version", std::string(tc::kVersion));
  app.require_subcommand(1);

  RunSource sample_src, corr_src, spacing_src, sweep_src;
  auto* sample = app.add_subcommand("sample", "dump raw eigenphases of the product and their rescaled positions");
  sample_src.attach(sample);
  auto* correlate = app.add_subcommand("correlate", "estimate pair correlation, spacings and count variance");
  corr_src.attach(correlate);
  auto* spacings = app.add_subcommand("spacings", "spacing distribution and KS distance to the exponential law");
  spacing_src.attach(spacings);

  auto* sweep = app.add_subcommand("sweep", "pair-mode rms deviation from the fixed-m limit as n grows");
  sweep_src.attach(sweep);
  std::vector<int> n_values;
  sweep->add_option("--n-values", n_values, "ascending n values")->required()->delimiter(',');

  auto* refcurve = app.add_subcommand("refcurve", "analytic reference curve rho^(k)(0, d, ..., (k-1)d)");
  std::string kind = "sine_pair", grid_text = "0:4:0.05", ref_file;
  int ref_m = 1, ref_k = 2;
  refcurve->add_option("--kind", kind, "sine_pair | superposed_pair | poisson")->capture_default_str();
  refcurve->add_option("--m", ref_m, "number of superposed copies")->capture_default_str();
  refcurve->add_option("--k", ref_k, "correlation order")->capture_default_str();
  refcurve->add_option("--grid", grid_text, "start:stop:step or comma list")->capture_default_str();
  refcurve->add_option("--file", ref_file, "write CSV here instead of stdout");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  int verify_workers = 0;
  std::vector<int> only;
  verify->add_option("--workers", verify_workers, "worker threads (default: TENSORCUE_WORKERS or all cores)");
  verify->add_option("--only", only, "criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sample) return cmd_sample(sample_src);
    if (*correlate) return cmd_correlate(corr_src);
    if (*spacings) return cmd_spacings(spacing_src);
    if (*sweep) return cmd_sweep(sweep_src, n_values);
    if (*refcurve) return cmd_refcurve(kind, ref_m, ref_k, grid_text, ref_file);
    if (*verify) return cmd_verify(verify_workers, only);
  } catch (const tc::capacity_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
