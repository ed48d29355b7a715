#include "ivridge/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "format.hpp"
#include "ivridge/error.hpp"
#include "ivridge/theory.hpp"

namespace ivridge::montecarlo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using detail::format_double;

estimators::Method estimator_for(McMethod method) {
  switch (method) {
    case McMethod::ols: return estimators::Method::ols;
    case McMethod::tsls_ridge: return estimators::Method::tsls_ridge;
    case McMethod::ba_tsls_ridge:
    case McMethod::ba_tsls_ridge_cv: return estimators::Method::ba_tsls_ridge;
    case McMethod::nagar: return estimators::Method::nagar;
    case McMethod::liml: return estimators::Method::liml;
    case McMethod::ridgeless_tsls: return estimators::Method::ridgeless_tsls;
  }
  fail(ErrorCode::contract, "unknown method");
}

ReplicationRow flagged_row(int r, McMethod method, double lambda, ErrorCode code) {
  ReplicationRow row;
  row.replication = r;
  row.method = method;
  row.lambda = lambda;
  row.beta_hat = kNaN;
  row.variance_hat = kNaN;
  row.signal = kNaN;
  row.flags = to_string(code);
  return row;
}

ReplicationRow run_cell(const dgp::Dataset& data, int r, McMethod method, double lambda) {
  try {
    const auto res = estimators::estimate(data, estimator_for(method), lambda);
    ReplicationRow row;
    row.replication = r;
    row.method = method;
    row.lambda = lambda;
    row.beta_hat = res.beta_hat;
    row.variance_hat = res.variance_hat.value_or(kNaN);
    row.signal = res.signal;
    const auto it = res.diagnostics.find("variance_floored");
    if (it != res.diagnostics.end() && it->second != 0.0) row.flags = "variance_floored";
    return row;
  } catch (const Error& e) {
    return flagged_row(r, method, lambda, e.code());
  }
}

void cell_plan(const ExperimentConfig& config, const std::function<void(McMethod, double)>& visit) {
  for (McMethod method : config.methods) {
    if (method == McMethod::ba_tsls_ridge_cv || lambda_free(method)) {
      visit(method, 0.0);
      continue;
    }
    for (double lambda : config.lambda_grid) visit(method, lambda);
  }
}

std::vector<ReplicationRow> replicate(const ExperimentConfig& config, int r) {
  std::vector<ReplicationRow> rows;
  dgp::ModelParams params = config.params;
  params.seed = dgp::stream_seed(config.base_seed, static_cast<std::uint64_t>(r));

  std::optional<dgp::Dataset> data;
  try {
    data.emplace(dgp::generate(params));
  } catch (const Error& e) {
    cell_plan(config, [&](McMethod m, double l) { rows.push_back(flagged_row(r, m, l, e.code())); });
    return rows;
  }

  cell_plan(config, [&](McMethod method, double lambda) {
    if (method != McMethod::ba_tsls_ridge_cv) {
      rows.push_back(run_cell(*data, r, method, lambda));
      return;
    }
    try {
      const auto cv = estimators::cv_select(*data, config.cv_grid, config.cv_plugin);
      rows.push_back(run_cell(*data, r, method, cv.lambda_star));
    } catch (const Error& e) {
      rows.push_back(flagged_row(r, method, kNaN, e.code()));
    }
  });
  return rows;
}

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

// Linear-interpolation quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool selects(const ReplicationRow& row, McMethod method, LambdaPolicy policy) {
  if (row.method != method) return false;
  if (method == McMethod::ba_tsls_ridge_cv || lambda_free(method)) return true;
  return row.lambda == policy.lambda;
}

std::string csv_prefix(const ExperimentConfig& config) {
  return config.figure_tag + ',' + format_double(config.params.gamma()) + ',' + config.params.sigma.label() + ',' +
         format_double(config.params.f_stat);
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  return out;
}

void close_csv(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

dgp::ModelParams figure_params(double gamma, dgp::SigmaSpec sigma, double f_stat) {
  dgp::ModelParams p;
  p.n = 200;
  p.k = static_cast<int>(std::lround(gamma * p.n));
  p.beta = 0.0;
  p.rho = 0.6;
  p.f_stat = f_stat;
  p.sigma = sigma;
  return p;
}

}  // namespace

std::string_view to_string(McMethod method) noexcept {
  if (method == McMethod::ba_tsls_ridge_cv) return "ba_tsls_ridge_cv";
  return estimators::to_string(estimator_for(method));
}

McMethod parse_mc_method(std::string_view name) {
  if (name == "ba_tsls_ridge_cv" || name == "ba-tsls-cv") return McMethod::ba_tsls_ridge_cv;
  switch (estimators::parse_method(name)) {
    case estimators::Method::ols: return McMethod::ols;
    case estimators::Method::tsls_ridge: return McMethod::tsls_ridge;
    case estimators::Method::ba_tsls_ridge: return McMethod::ba_tsls_ridge;
    case estimators::Method::nagar: return McMethod::nagar;
    case estimators::Method::liml: return McMethod::liml;
    case estimators::Method::ridgeless_tsls: return McMethod::ridgeless_tsls;
  }
  fail(ErrorCode::config, "unknown method '" + std::string(name) + "'");
}

bool lambda_free(McMethod method) noexcept {
  return method == McMethod::ols || method == McMethod::nagar || method == McMethod::liml ||
         method == McMethod::ridgeless_tsls;
}

std::string_view to_string(Overlay overlay) noexcept {
  switch (overlay) {
    case Overlay::none: return "none";
    case Overlay::bias: return "bias";
    case Overlay::signal: return "signal";
    case Overlay::variance: return "variance";
  }
  return "unknown";
}

Overlay parse_overlay(std::string_view name) {
  if (name == "none") return Overlay::none;
  if (name == "bias") return Overlay::bias;
  if (name == "signal") return Overlay::signal;
  if (name == "variance") return Overlay::variance;
  fail(ErrorCode::config, "unknown overlay '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  params.validate();
  if (replications < 1) fail(ErrorCode::config, "replications must be at least 1");
  if (methods.empty()) fail(ErrorCode::config, "methods must not be empty");
  const bool needs_grid = std::any_of(methods.begin(), methods.end(), [](McMethod m) {
    return !lambda_free(m) && m != McMethod::ba_tsls_ridge_cv;
  });
  if (needs_grid && lambda_grid.empty()) fail(ErrorCode::config, "lambda_grid must not be empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] >= 0.0) || !std::isfinite(lambda_grid[i]))
      fail(ErrorCode::config, "lambda_grid entries must be finite and nonnegative");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
      fail(ErrorCode::config, "lambda_grid must be strictly ascending");
  }
  const bool has_cv = std::find(methods.begin(), methods.end(), McMethod::ba_tsls_ridge_cv) != methods.end();
  if (has_cv) {
    if (cv_grid.empty()) fail(ErrorCode::config, "cv_grid must not be empty");
    for (double l : cv_grid)
      if (!(l > 0.0) || !std::isfinite(l)) fail(ErrorCode::config, "cv_grid entries must be positive");
  }
}

std::string ExperimentConfig::file_stem() const {
  return (figure_tag.empty() ? std::string("experiment") : figure_tag) + "_" + format_double(params.gamma());
}

bool ReplicationRow::flagged() const noexcept { return std::isnan(beta_hat); }

ReplicationTable run(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const int reps = config.replications;
  std::vector<std::vector<ReplicationRow>> slots(static_cast<std::size_t>(reps));

  workers = std::clamp(workers, 1u, static_cast<unsigned>(reps));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (int r = next++; r < reps; r = next++) slots[static_cast<std::size_t>(r)] = replicate(config, r);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = reps;
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ReplicationTable table;
  table.config = config;
  for (auto& slot : slots)
    for (auto& row : slot) table.rows.push_back(std::move(row));
  return table;
}

double overlay_value(const ExperimentConfig& config, McMethod method, double lambda,
                     const spectral::SpectralMeasure& H) {
  const auto sp = config.params.structural();
  const double gamma = sp.gamma;
  try {
    switch (config.overlay) {
      case Overlay::none: return kNaN;
      case Overlay::bias:
        switch (method) {
          case McMethod::ols: return theory::bias_ols(sp);
          case McMethod::tsls_ridge:
            return theory::bias_tsls_ridge_limit(sp, spectral::population_transforms(H, gamma, lambda));
          case McMethod::ridgeless_tsls:
            return theory::bias_tsls_ridge_limit(sp, spectral::population_transforms(H, gamma, 0.0));
          case McMethod::ba_tsls_ridge:
            return lambda == 0.0 && gamma >= 1.0 ? kNaN : 0.0;
          case McMethod::nagar:
          case McMethod::liml: return gamma < 1.0 ? 0.0 : kNaN;
          case McMethod::ba_tsls_ridge_cv: return 0.0;
        }
        return kNaN;
      case Overlay::signal: {
        if (method == McMethod::ba_tsls_ridge)
          return sp.alpha2 * theory::signal_f(spectral::population_transforms(H, gamma, lambda));
        if (method == McMethod::tsls_ridge) {
          const auto tv = spectral::population_transforms(H, gamma, lambda);
          return sp.alpha2 * (1.0 - lambda * tv.p()) + sp.sigma_nu2 * (1.0 - tv.lambda_v);
        }
        return kNaN;
      }
      case Overlay::variance:
        if (method == McMethod::ba_tsls_ridge)
          return theory::asy_variance_ba_ridge(sp, spectral::population_transforms(H, gamma, lambda));
        if (method == McMethod::nagar && gamma < 1.0) return theory::bekker_asy_variance(sp);
        return kNaN;
    }
  } catch (const Error&) {
    return kNaN;
  }
  return kNaN;
}

std::vector<SummaryRow> summarize(const ReplicationTable& table) {
  const auto& config = table.config;
  if (table.rows.empty()) fail(ErrorCode::contract, "cannot summarise an empty table");
  const auto H = dgp::population_spectrum(config.params.sigma);
  const bool use_signal = config.overlay == Overlay::signal;

  std::vector<SummaryRow> out;
  cell_plan(config, [&](McMethod method, double lambda) {
    const bool cv = method == McMethod::ba_tsls_ridge_cv;
    std::vector<double> values, variances, selected;
    int flagged = 0;
    for (const auto& row : table.rows) {
      if (row.method != method || (!cv && row.lambda != lambda)) continue;
      if (row.flagged()) {
        ++flagged;
        continue;
      }
      values.push_back(use_signal ? row.signal : row.beta_hat);
      if (std::isfinite(row.variance_hat)) variances.push_back(row.variance_hat);
      if (cv) selected.push_back(row.lambda);
    }

    SummaryRow s;
    s.method = method;
    s.lambda = cv ? median(selected) : lambda;
    s.count = static_cast<int>(values.size());
    s.n_flagged = flagged;
    s.mean = kNaN;
    s.sd = kNaN;
    s.se = kNaN;
    if (!values.empty()) {
      double sum = 0.0;
      for (double v : values) sum += v;
      s.mean = sum / s.count;
    }
    if (values.size() >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.sd = std::sqrt(ss / (s.count - 1));
      s.se = s.sd / std::sqrt(static_cast<double>(s.count));
    }
    s.bias = use_signal ? kNaN : s.mean - config.params.beta;
    s.mean_variance_hat = kNaN;
    if (!variances.empty()) {
      double sum = 0.0;
      for (double v : variances) sum += v;
      s.mean_variance_hat = sum / static_cast<double>(variances.size());
    }
    s.theory = overlay_value(config, method, cv ? kNaN : lambda, H);
    if (cv && config.overlay != Overlay::bias) s.theory = kNaN;
    out.push_back(s);
  });
  return out;
}

Density kernel_density(std::span<const double> sample) {
  if (sample.empty()) fail(ErrorCode::contract, "density needs a nonempty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  for (double x : xs)
    if (!std::isfinite(x)) fail(ErrorCode::domain, "density sample contains non-finite values");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());

  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);

  Density d;
  if (sd == 0.0) {
    d.bandwidth = 1e-3 * std::max(1.0, std::abs(xs.front()));
  } else {
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    d.bandwidth = 0.9 * spread * std::pow(n, -0.2);
  }
  const double h = d.bandwidth;
  const double reach = 8.0 * h;
  const double step = h / 4.0;

  // Grid only where the density is not negligible: the union of
  // [x - 8h, x + 8h] over the sample, sampled at spacing h/4.
  std::size_t i = 0;
  while (i < xs.size()) {
    const double lo = xs[i] - reach;
    double hi = xs[i] + reach;
    while (i < xs.size() && xs[i] - reach <= hi) {
      hi = std::max(hi, xs[i] + reach);
      ++i;
    }
    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    for (std::size_t j = 0; j <= steps; ++j) d.grid.push_back(lo + (hi - lo) * static_cast<double>(j) / steps);
  }

  const double norm = 1.0 / (n * h * std::sqrt(2.0 * std::numbers::pi));
  d.values.resize(d.grid.size());
  std::size_t first = 0;
  for (std::size_t g = 0; g < d.grid.size(); ++g) {
    const double at = d.grid[g];
    while (first < xs.size() && xs[first] < at - reach) ++first;
    double sum = 0.0;
    for (std::size_t j = first; j < xs.size() && xs[j] <= at + reach; ++j) {
      const double u = (at - xs[j]) / h;
      sum += std::exp(-0.5 * u * u);
    }
    d.values[g] = norm * sum;
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < d.values.size(); ++g)
    if (d.values[g] > d.values[best]) best = g;
  d.mode = d.grid[best];
  for (std::size_t g = 1; g < d.grid.size(); ++g)
    d.integral += 0.5 * (d.values[g] + d.values[g - 1]) * (d.grid[g] - d.grid[g - 1]);
  return d;
}

Density density(const ReplicationTable& table, McMethod method, LambdaPolicy policy) {
  if (policy.cross_validated != (method == McMethod::ba_tsls_ridge_cv))
    fail(ErrorCode::contract, "the cv lambda policy goes with ba_tsls_ridge_cv only");
  std::vector<double> sample;
  for (const auto& row : table.rows)
    if (selects(row, method, policy) && !row.flagged()) sample.push_back(row.beta_hat);
  if (sample.size() < kMinDensitySample)
    fail(ErrorCode::contract, "density needs at least " + std::to_string(kMinDensitySample) +
                                  " estimates, got " + std::to_string(sample.size()));
  return kernel_density(sample);
}

std::vector<ExperimentConfig> figure_configs() {
  using dgp::SigmaKind;
  const dgp::SigmaSpec iso{SigmaKind::isotropic, 0.0};
  const dgp::SigmaSpec ar1{SigmaKind::ar1, 0.5};
  std::vector<ExperimentConfig> out;

  auto make = [](std::string tag, dgp::ModelParams p, std::vector<double> grid, std::vector<McMethod> methods,
                 int reps, Overlay overlay) {
    ExperimentConfig c;
    c.figure_tag = std::move(tag);
    c.params = p;
    c.lambda_grid = std::move(grid);
    c.methods = std::move(methods);
    c.replications = reps;
    c.overlay = overlay;
    return c;
  };
  // lambda = 0 is kept off the grid past the interpolation threshold, where
  // the ridgeless adjusted estimator does not exist.
  auto bias_grid = [](double gamma) { return gamma < 1.0 ? linear_grid(0.0, 2.0, 10) : linear_grid(0.2, 2.0, 10); };

  for (double g : {0.75, 1.25})
    out.push_back(make("fig1", figure_params(g, ar1, 5.0), bias_grid(g),
                       {McMethod::tsls_ridge, McMethod::ridgeless_tsls, McMethod::ols}, 500, Overlay::bias));
  for (double g : {0.75, 1.25})
    out.push_back(make("fig2", figure_params(g, ar1, 5.0), bias_grid(g), {McMethod::ba_tsls_ridge, McMethod::ols},
                       500, Overlay::bias));
  for (const auto& [tag, sigma] : {std::pair{"fig3", iso}, std::pair{"fig3_ar1", ar1}})
    for (double g : {0.5, 0.6, 0.75, 1.25})
      out.push_back(make(tag, figure_params(g, sigma, 5.0), linear_grid(0.0, 2.0, 10), {McMethod::ba_tsls_ridge},
                         500, Overlay::signal));
  for (const auto& [tag, sigma] : {std::pair{"fig4", iso}, std::pair{"fig4_ar1", ar1}})
    for (double g : {0.75, 1.25}) {
      std::vector<McMethod> methods{McMethod::ba_tsls_ridge};
      if (g < 1.0) methods.insert(methods.end(), {McMethod::nagar, McMethod::liml});
      out.push_back(make(tag, figure_params(g, sigma, 5.0), linear_grid(0.2, 2.0, 10), methods, 500,
                         Overlay::variance));
    }
  for (double f : {1.0, 2.0, 5.0})
    for (double g : {0.75, 1.25}) {
      // The ridgeless adjusted estimator is Nagar below the threshold; above
      // it the smallest cv penalty stands in for the ridgeless limit.
      std::vector<double> grid{g < 1.0 ? 0.0 : 1e-3};
      std::vector<McMethod> methods{McMethod::ridgeless_tsls, McMethod::ba_tsls_ridge};
      if (g < 1.0) methods.push_back(McMethod::liml);
      methods.push_back(McMethod::ba_tsls_ridge_cv);
      out.push_back(make("fig5_F" + format_double(f), figure_params(g, ar1, f), grid, methods, 1000, Overlay::bias));
    }
  return out;
}

std::vector<ExperimentConfig> figure_configs(std::string_view tag) {
  std::vector<ExperimentConfig> out;
  const std::string prefix = std::string(tag) + "_";
  for (auto& c : figure_configs()) {
    const std::string_view t = c.figure_tag;
    if (t == tag || t.substr(0, prefix.size()) == prefix) out.push_back(std::move(c));
  }
  if (out.empty()) fail(ErrorCode::config, "unknown figure tag '" + std::string(tag) + "'");
  return out;
}

void write_summary_csv(const ExperimentConfig& config, std::span<const SummaryRow> rows,
                       const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "figure_tag,gamma,sigma_kind,F,method,lambda,mc_mean,mc_bias,mc_sd,mc_se,mean_var_hat,theory_value,"
         "n_flagged\n";
  const std::string prefix = csv_prefix(config);
  for (const auto& s : rows) {
    out << prefix << ',' << to_string(s.method) << ',' << format_double(s.lambda) << ',' << format_double(s.mean)
        << ',' << format_double(s.bias) << ',' << format_double(s.sd) << ',' << format_double(s.se) << ','
        << format_double(s.mean_variance_hat) << ',' << format_double(s.theory) << ',' << s.n_flagged << '\n';
  }
  close_csv(out, path);
}

void write_replications_csv(const ReplicationTable& table, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "figure_tag,gamma,sigma_kind,F,replication,method,lambda,beta_hat,variance_hat,signal,flags\n";
  const std::string prefix = csv_prefix(table.config);
  for (const auto& row : table.rows) {
    out << prefix << ',' << row.replication << ',' << to_string(row.method) << ',' << format_double(row.lambda)
        << ',' << format_double(row.beta_hat) << ',' << format_double(row.variance_hat) << ','
        << format_double(row.signal) << ',' << row.flags << '\n';
  }
  close_csv(out, path);
}

void write_density_csv(const ReplicationTable& table, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "figure_tag,gamma,sigma_kind,F,method,lambda_policy,beta,density\n";
  const std::string prefix = csv_prefix(table.config);
  auto emit = [&](McMethod method, LambdaPolicy policy, const std::string& label) {
    Density d;
    try {
      d = density(table, method, policy);
    } catch (const Error&) {
      return;  // too few unflagged estimates for this cell
    }
    for (std::size_t g = 0; g < d.grid.size(); ++g)
      out << prefix << ',' << to_string(method) << ',' << label << ',' << format_double(d.grid[g]) << ','
          << format_double(d.values[g]) << '\n';
  };
  cell_plan(table.config, [&](McMethod method, double lambda) {
    if (method == McMethod::ba_tsls_ridge_cv)
      emit(method, LambdaPolicy::cv(), "cv");
    else if (lambda_free(method))
      emit(method, LambdaPolicy::fixed(0.0), "none");
    else
      emit(method, LambdaPolicy::fixed(lambda), format_double(lambda));
  });
  close_csv(out, path);
}

std::vector<std::filesystem::path> run_and_write(const ExperimentConfig& config, unsigned workers,
                                                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + out_dir.string() + ": " + ec.message());

  const auto table = run(config, workers);
  const auto summary = summarize(table);
  const std::string stem = config.file_stem();
  std::vector<std::filesystem::path> paths{out_dir / (stem + ".csv"), out_dir / (stem + "_replications.csv")};
  write_summary_csv(config, summary, paths[0]);
  write_replications_csv(table, paths[1]);
  if (std::find(config.methods.begin(), config.methods.end(), McMethod::ba_tsls_ridge_cv) != config.methods.end()) {
    paths.push_back(out_dir / (stem + "_density.csv"));
    write_density_csv(table, paths.back());
  }
  return paths;
}

unsigned worker_count_from_env() {
  unsigned count = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RMT_IV_THREADS"); env && *env) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) fail(ErrorCode::config, "RMT_IV_THREADS must be a positive integer");
    count = std::min(count, static_cast<unsigned>(cap));
  }
  return count;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1 || !(hi >= lo)) fail(ErrorCode::domain, "linear grid needs lo <= hi and points >= 1");
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  out.back() = hi;
  return out;
}

}  // namespace ivridge::montecarlo
