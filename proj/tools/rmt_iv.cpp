// rmt-iv: simulate, theory, estimate and generate subcommands over the C API.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivridge/ivridge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ivr_status status;
  ApiError(ivr_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(ivr_status status) {
  if (status != IVR_OK) throw ApiError(status, ivr_last_error());
}

std::string fmt(double value) {
  if (std::isnan(value)) return "NA";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw UsageError("bad number '" + text + "' in " + what);
  return value;
}

struct GridSpec {
  double lo, hi;
  int points;
};

// "lo:hi:points"
GridSpec parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw UsageError("grid must look like lo:hi:points, got '" + text + "'");
  GridSpec g{parse_double(text.substr(0, a), "grid"), parse_double(text.substr(a + 1, b - a - 1), "grid"), 0};
  const double points = parse_double(text.substr(b + 1), "grid");
  if (points < 1 || points != std::floor(points)) throw UsageError("grid point count must be a positive integer");
  g.points = static_cast<int>(points);
  if (!(g.hi >= g.lo)) throw UsageError("grid needs lo <= hi");
  return g;
}

std::vector<double> linear(const GridSpec& g) {
  std::vector<double> out(static_cast<std::size_t>(g.points));
  for (int i = 0; i < g.points; ++i) out[i] = g.points == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.points - 1);
  if (g.points > 1) out.back() = g.hi;
  return out;
}

std::vector<double> logarithmic(const GridSpec& g) {
  if (!(g.lo > 0.0)) throw UsageError("cv grid needs lo > 0");
  std::vector<double> out(static_cast<std::size_t>(g.points));
  const double a = std::log(g.lo);
  const double step = g.points > 1 ? (std::log(g.hi) - a) / (g.points - 1) : 0.0;
  for (int i = 0; i < g.points; ++i) out[i] = std::exp(a + step * i);
  out.front() = g.lo;
  if (g.points > 1) out.back() = g.hi;
  return out;
}

// Writes to the named file, or standard output when the name is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ApiError(IVR_ERR_IO, "io: cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct DatasetHandle {
  ivr_dataset* ptr = nullptr;
  ~DatasetHandle() { ivr_dataset_free(ptr); }
};

struct ExperimentsHandle {
  ivr_experiments* ptr = nullptr;
  ~ExperimentsHandle() { ivr_experiments_free(ptr); }
};

struct SimulateArgs {
  std::string config;
  std::string figure;
  std::optional<int> reps;
  std::string out;
  unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& args) {
  if (args.config.empty() == args.figure.empty()) throw UsageError("give either a config file or --figure");
  ExperimentsHandle set;
  if (!args.figure.empty())
    check(ivr_experiments_from_figure(args.figure.c_str(), &set.ptr));
  else
    check(ivr_experiments_from_json_file(args.config.c_str(), &set.ptr));

  const std::size_t count = ivr_experiments_size(set.ptr);
  if (args.reps) {
    int configured = 0;
    check(ivr_experiments_replications(set.ptr, 0, &configured));
    check(ivr_experiments_set_replications(set.ptr, *args.reps));
    if (*args.reps < configured)
      std::cerr << "note: running " << *args.reps << " replications instead of " << configured
                << "; MC standard errors grow and the acceptance tolerances assume the full count\n";
  }
  check(ivr_experiments_run(set.ptr, args.threads, args.out.c_str()));
  for (std::size_t i = 0; i < count; ++i) {
    char stem[256];
    check(ivr_experiments_describe(set.ptr, i, stem, sizeof stem));
    std::cout << args.out << "/" << stem << ".csv\n";
  }
  return kExitOk;
}

struct TheoryArgs {
  std::string kind;
  double gamma = 0.0;
  std::string sigma = "isotropic";
  std::string grid = "0:2:50";
  double rho = 0.6;
  double f_stat = 5.0;
  int n = 200;
  std::string out;
};

int cmd_theory(const TheoryArgs& args) {
  const auto lambdas = linear(parse_grid(args.grid));
  ivr_theory_params params;
  ivr_theory_params_default(&params);
  params.gamma = args.gamma;
  params.rho = args.rho;
  params.f_stat = args.f_stat;
  params.n = args.n;
  std::vector<double> values(lambdas.size());
  check(ivr_theory_curve(args.kind.c_str(), args.sigma.c_str(), &params, lambdas.data(), lambdas.size(),
                         values.data()));
  Output out(args.out);
  out.stream() << "kind,gamma,sigma,lambda,value\n";
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    out.stream() << args.kind << ',' << fmt(args.gamma) << ',' << args.sigma << ',' << fmt(lambdas[i]) << ','
                 << fmt(values[i]) << '\n';
  return kExitOk;
}

struct EstimateArgs {
  std::string data;
  std::string method;
  std::string lambda = "1";
  std::string grid = "0.001:10:40";
  std::string out;
};

int cmd_estimate(const EstimateArgs& args) {
  DatasetHandle data;
  check(ivr_dataset_read_csv(args.data.c_str(), &data.ptr));
  ivr_estimate_result r{};
  const bool cv = args.lambda == "cv";
  if (cv) {
    if (args.method != "ba-tsls" && args.method != "ba_tsls" && args.method != "ba_tsls_ridge")
      throw UsageError("--lambda cv is available for ba-tsls only");
    const auto grid = logarithmic(parse_grid(args.grid));
    check(ivr_estimate_cv(data.ptr, grid.data(), grid.size(), &r));
  } else {
    check(ivr_estimate(data.ptr, args.method.c_str(), parse_double(args.lambda, "--lambda"), &r));
  }
  Output out(args.out);
  out.stream() << "method,lambda,lambda_star,beta_hat,se_hat,signal,v_hat,f_hat_stat\n";
  out.stream() << args.method << ',' << fmt(r.lambda) << ',' << (cv ? fmt(r.lambda) : "NA") << ','
               << fmt(r.beta_hat) << ',' << fmt(r.se_hat) << ',' << fmt(r.signal) << ',' << fmt(r.v_hat) << ','
               << fmt(r.f_hat_stat) << '\n';
  return kExitOk;
}

int cmd_generate(const ivr_model_params& params, const std::string& out) {
  DatasetHandle data;
  check(ivr_dataset_generate(&params, &data.ptr));
  check(ivr_dataset_write_csv(data.ptr, out.c_str()));
  std::cout << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ridge-regularised 2SLS with many instruments"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run Monte Carlo experiments and write CSVs");
  simulate->add_option("config", sim.config, "JSON experiment config");
  simulate->add_option("--figure", sim.figure, "Built-in figure family (fig1 .. fig5, or a full tag)");
  simulate->add_option("--reps", sim.reps, "Override the replication count")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--threads", sim.threads, "Worker threads (default: hardware, capped by RMT_IV_THREADS)");

  TheoryArgs th;
  auto* theory = app.add_subcommand("theory", "Evaluate a limit curve over a linear lambda grid");
  theory->add_option("--kind", th.kind, "bias | signal_f | amplifier_a | asy_variance")->required();
  theory->add_option("--gamma", th.gamma, "k / n")->required();
  theory->add_option("--sigma", th.sigma, "isotropic | ar1:<rho_z> | equicorrelated:<rho_z>");
  theory->add_option("--grid", th.grid, "lo:hi:points");
  theory->add_option("--rho", th.rho, "corr(eps, nu)");
  theory->add_option("--f-stat", th.f_stat, "population first-stage F");
  theory->add_option("--n", th.n, "sample size used by the variance curve");
  theory->add_option("--out", th.out, "Output CSV (default: stdout)");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate beta from a y,x,z1..zk CSV");
  estimate->add_option("data", est.data, "Data CSV")->required();
  estimate->add_option("--method", est.method, "ols | tsls | ba-tsls | nagar | liml | ridgeless-tsls")->required();
  estimate->add_option("--lambda", est.lambda, "Ridge penalty, or cv (ba-tsls)");
  estimate->add_option("--grid", est.grid, "Log-spaced cv grid lo:hi:points");
  estimate->add_option("--out", est.out, "Output CSV (default: stdout)");

  ivr_model_params gen;
  ivr_model_params_default(&gen);
  std::string gen_sigma = "isotropic";
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Simulate one dataset and write it as CSV");
  generate->add_option("--n", gen.n, "observations");
  generate->add_option("--k", gen.k, "instruments");
  generate->add_option("--f-stat", gen.f_stat, "population first-stage F");
  generate->add_option("--rho", gen.rho, "corr(eps, nu)");
  generate->add_option("--beta", gen.beta, "structural coefficient");
  generate->add_option("--sigma", gen_sigma, "isotropic | ar1:<rho_z> | equicorrelated:<rho_z>");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--out", gen_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (theory->parsed()) return cmd_theory(th);
    if (estimate->parsed()) return cmd_estimate(est);
    gen.sigma = gen_sigma.c_str();
    return cmd_generate(gen, gen_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.status == IVR_ERR_CONFIG ? kExitConfig : kExitRuntime;
  }
}
