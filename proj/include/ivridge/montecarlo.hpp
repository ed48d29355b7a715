#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivridge/dgp.hpp"
#include "ivridge/estimators.hpp"

namespace ivridge::montecarlo {

/// Estimators the harness can run. ba_tsls_ridge_cv picks lambda per
/// replication by cross-validation over ExperimentConfig::cv_grid.
enum class McMethod { ols, tsls_ridge, ba_tsls_ridge, nagar, liml, ridgeless_tsls, ba_tsls_ridge_cv };

std::string_view to_string(McMethod method) noexcept;
McMethod parse_mc_method(std::string_view name);
/// True for methods that ignore the lambda grid (one row per replication).
bool lambda_free(McMethod method) noexcept;

/// Which theory curve is joined to the summary rows.
enum class Overlay { none, bias, signal, variance };

std::string_view to_string(Overlay overlay) noexcept;
Overlay parse_overlay(std::string_view name);

struct ExperimentConfig {
  dgp::ModelParams params;
  std::vector<double> lambda_grid;
  std::vector<McMethod> methods;
  int replications = 500;
  std::uint64_t base_seed = 20240917;
  std::string figure_tag;
  Overlay overlay = Overlay::bias;
  std::vector<double> cv_grid = estimators::default_cv_grid();
  estimators::CvPlugin cv_plugin = estimators::CvPlugin::per_lambda;

  /// replications >= 1, nonempty method list, ascending nonnegative grid.
  void validate() const;
  /// "<figure_tag>_<gamma>"
  std::string file_stem() const;
};

struct ReplicationRow {
  int replication = 0;
  McMethod method = McMethod::ols;
  double lambda = 0.0;  // selected lambda for ba_tsls_ridge_cv
  double beta_hat = 0.0;
  double variance_hat = 0.0;  // NaN when the method has no variance estimate
  double signal = 0.0;
  std::string flags;  // error code of a failed cell, or variance_floored

  bool flagged() const noexcept;
};

/// Rows ordered by (replication, method in config order, lambda).
struct ReplicationTable {
  ExperimentConfig config;
  std::vector<ReplicationRow> rows;
};

/// Replication r draws its data with seed stream_seed(base_seed, r). Work is
/// spread over `workers` threads; the table does not depend on the count.
/// Per-cell estimator errors become flagged rows with NaN values.
ReplicationTable run(const ExperimentConfig& config, unsigned workers = 1);

struct SummaryRow {
  McMethod method = McMethod::ols;
  double lambda = 0.0;  // median selected lambda for ba_tsls_ridge_cv
  int count = 0;        // unflagged replications
  double mean = 0.0;
  double bias = 0.0;    // NaN for the signal overlay
  double sd = 0.0;      // NaN below two replications
  double se = 0.0;
  double mean_variance_hat = 0.0;
  double theory = 0.0;  // NaN where the overlay has no curve
  int n_flagged = 0;
};

/// Per (method, lambda) statistics of beta_hat, or of the signal x'S x / n
/// when the overlay is `signal`.
std::vector<SummaryRow> summarize(const ReplicationTable& table);

/// Theory overlay for one method at one lambda; NaN when undefined.
double overlay_value(const ExperimentConfig& config, McMethod method, double lambda,
                     const spectral::SpectralMeasure& H);

struct LambdaPolicy {
  bool cross_validated = false;
  double lambda = 0.0;

  static LambdaPolicy fixed(double lambda) { return {false, lambda}; }
  static LambdaPolicy cv() { return {true, 0.0}; }
};

struct Density {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  double mode = 0.0;
  double integral = 0.0;  // trapezoid rule over the grid
};

inline constexpr std::size_t kMinDensitySample = 50;

/// Gaussian kernel density with Silverman's bandwidth. Identical values get
/// a narrow spike with bandwidth 1e-3 max(1, |x|).
Density kernel_density(std::span<const double> sample);

/// Density of the unflagged estimates of `method` selected by `policy`.
/// Fewer than kMinDensitySample estimates is a contract error.
Density density(const ReplicationTable& table, McMethod method, LambdaPolicy policy);

/// Built-in experiments behind the figure families fig1 .. fig5_F5.
std::vector<ExperimentConfig> figure_configs();
/// Configs whose tag equals `tag` or starts with "<tag>_".
std::vector<ExperimentConfig> figure_configs(std::string_view tag);

/// Summary, replication and (for fig5 families) density CSVs.
void write_summary_csv(const ExperimentConfig& config, std::span<const SummaryRow> rows,
                       const std::filesystem::path& path);
void write_replications_csv(const ReplicationTable& table, const std::filesystem::path& path);
void write_density_csv(const ReplicationTable& table, const std::filesystem::path& path);

/// Runs the experiment and writes <stem>.csv, <stem>_replications.csv and,
/// when the config has a cv method, <stem>_density.csv. Returns the paths.
std::vector<std::filesystem::path> run_and_write(const ExperimentConfig& config, unsigned workers,
                                                 const std::filesystem::path& out_dir);

/// Hardware concurrency capped by RMT_IV_THREADS when set.
unsigned worker_count_from_env();

/// `points` evenly spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int points);

}  // namespace ivridge::montecarlo
