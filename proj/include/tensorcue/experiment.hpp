#pragma once

// Monte Carlo campaigns over tensor-product eigenphase processes.
//
// Sample s always draws from RngStream(seed, s), whichever worker runs it,
// and all accumulators are integer-valued sums, so results do not depend on
// the worker count or on scheduling.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tensorcue/estimator.hpp"
#include "tensorcue/gof.hpp"

namespace tensorcue {

inline constexpr std::string_view kVersion = "0.3.0";
inline constexpr const char* kWorkersEnv = "TENSORCUE_WORKERS";

enum class Mode { single, pair, triple };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct ExperimentConfig {
  Mode mode = Mode::pair;
  std::vector<int> dims{2, 40};
  std::uint64_t n_samples = 1000;
  std::uint64_t seed = 1;
  double delta_max = 4.0;
  int n_bins = 40;
  double window_half_width = 4.0;
  int workers = 1;
  int k_analytic = 2;
  int n_batches = kDefaultBatches;
  std::vector<double> count_lengths{1.0, 2.0, 4.0};
  int translations = 32;
  double spacing_bin_width = 0.1;
  // Empty: keep results in memory only.
  std::filesystem::path output_dir;
};

// Throws std::invalid_argument describing the first violated constraint.
void validate(const ExperimentConfig& cfg);
std::size_t factor_product(const ExperimentConfig& cfg);

// TENSORCUE_WORKERS if set and positive, otherwise the hardware thread count.
int default_worker_count();

// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});
void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value);

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);

struct RunManifest {
  ExperimentConfig config;
  std::string version{kVersion};
  std::string started;
  std::string finished;
  std::vector<std::vector<std::uint64_t>> worker_streams;
  std::vector<std::string> outputs;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);

struct ExperimentResult {
  EstimateBundle bundle;
  RunManifest manifest;
  // Pair correlation against the analytic limit of the mode (bin averages).
  CurveComparison limit_fit;
  KsResult spacing_ks;
};

// Factors for one sample, drawn in order from `rng`.
std::vector<PhaseVector> sample_factors(const ExperimentConfig& cfg, RngStream& rng);
RescaledConfig combine_factors(const std::vector<PhaseVector>& factors);

// Limit pair correlation of the mode: sine for single, superposed sines over
// dims[0] copies for pair, Poisson for triple.
double limit_pair_correlation(const ExperimentConfig& cfg, double delta);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  int n = 0;
  double rms_dev = 0.0;
  double max_abs_dev = 0.0;
  int n_bins_over_4sigma = 0;
};

// Pair mode with dims[0] fixed and dims[1] running over n_values (ascending),
// each compared with the superposed-sine limit.
std::vector<SweepRow> run_convergence_sweep(const ExperimentConfig& base,
                                            const std::vector<int>& n_values);

enum class CurveKind { sine_pair, superposed_pair, poisson };

CurveKind parse_curve_kind(std::string_view text);

// rho^(k)(0, d, 2d, ..., (k-1)d) of the chosen limit process; k = 2 gives the
// pair correlation.
std::vector<double> reference_curve(CurveKind kind, int m, std::span<const double> grid, int k = 2);

void emit_reference_curve(CurveKind kind, int m, std::span<const double> grid,
                          const std::filesystem::path& path, int k = 2);

// CSV helpers: 17 significant digits, LF endings, '#' metadata preamble.
std::string format_real(double x);
std::string csv_preamble(const ExperimentConfig& cfg);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace tensorcue
