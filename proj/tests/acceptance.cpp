// Acceptance run: one PASS/FAIL line per criterion, full-size Monte Carlo.
// Exit status is nonzero when any criterion fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "brute.hpp"
#include "ivridge/dgp.hpp"
#include "ivridge/estimators.hpp"
#include "ivridge/montecarlo.hpp"
#include "ivridge/spectral.hpp"
#include "ivridge/theory.hpp"

using namespace ivridge;
using montecarlo::McMethod;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

unsigned workers() { return montecarlo::worker_count_from_env(); }

dgp::Dataset sample(int n, int k, std::uint64_t seed) {
  dgp::ModelParams p;
  p.n = n;
  p.k = k;
  p.seed = seed;
  return dgp::generate(p);
}

std::vector<double> log_points(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return out;
}

Verdict criterion_identities() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  double kernel = 0.0, companion = 0.0, trace = 0.0;
  for (int k : {10, 45}) {
    const auto d = sample(30, k, 1000 + k);
    const double gamma = k / 30.0;
    for (double lambda : {1e-3, 0.1, 1.0, 5.0}) {
      kernel = std::max(kernel, (brute::smoother_primal(d.Z(), lambda) - brute::smoother_dual(d.Z(), lambda)).norm());
      const double lv = lambda * brute::v_hat(d.Z(), lambda);
      const double lm = lambda * brute::m_hat(d.Z(), lambda);
      companion = std::max(companion, std::abs(lv - (1.0 - gamma * (1.0 - lm))));
      trace = std::max(trace, std::abs(brute::adjusted_smoother(d.Z(), lambda).trace() / 30.0));
      trace = std::max(trace, std::abs(estimators::smoother_quadratics(d, lambda).trace_S_over_n));
    }
  }

  const auto d = sample(40, 20, 2024);
  const auto forms = estimators::nagar_representations(d);
  const double nagar = std::max(std::abs(forms.projector_odds - forms.weighted), std::abs(forms.projector_odds - forms.centred));

  double quad = 0.0;
  const Eigen::VectorXd& x = d.x();
  const Eigen::VectorXd& y = d.y();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(40, 40);
  for (double lambda : {0.05, 0.5, 2.0}) {
    const auto q = estimators::smoother_quadratics(d, lambda);
    const double s = q.shrink();
    const Eigen::MatrixXd P = brute::smoother_primal(d.Z(), lambda);
    const Eigen::MatrixXd S = brute::adjusted_smoother(d.Z(), lambda);
    quad = std::max(quad, (S * S - (P * P - 2 * s * P + s * s * I)).norm());
    const double beta = x.dot(S * y) / x.dot(S * x);
    const Eigen::VectorXd e = y - beta * x;
    quad = std::max(quad, std::abs(x.dot(P * e) - s * x.dot(e)));
    const Eigen::VectorXd x_tilde = x + e * (e.dot(x) / e.dot(e));
    const double dense = x.dot(S * (S * x_tilde)) / 40.0;
    quad = std::max(quad, std::abs(estimators::sandwich_numerator_simplified(q, beta) - dense));
    quad = std::max(quad, std::abs(estimators::sandwich_numerator(q, s, beta) - dense));
    quad = std::max(quad, std::abs(q.xSSx() - x.dot(S * (S * x)) / 40.0));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  v.require(kernel <= 1e-9, fmt("kernel trick %.2e > 1e-9", kernel));
  v.require(companion <= 1e-12, fmt("companion %.2e > 1e-12", companion));
  v.require(trace <= 1e-12, fmt("trace %.2e > 1e-12", trace));
  v.require(nagar <= 1e-10, fmt("nagar forms %.2e > 1e-10", nagar));
  v.require(quad <= 1e-8, fmt("quadratic forms %.2e > 1e-8", quad));
  v.require(seconds < 10.0, fmt("took %.1f s", seconds));
  v.note(fmt("kernel %.1e companion %.1e trace %.1e nagar %.1e quad %.1e in %.2f s", kernel, companion, trace, nagar,
             quad, seconds));
  return v;
}

Verdict criterion_solver() {
  Verdict v;
  const auto iso = spectral::psd_point_mass(1.0);
  const auto ar1 = spectral::psd_ar1(0.5);
  double closed = 0.0, residual = 0.0, deriv = 0.0;
  for (double gamma : {0.5, 0.6, 0.75, 1.25}) {
    for (double lambda : log_points(1e-3, 10.0, 30)) {
      const auto sol = spectral::solve_silverstein_report(iso, gamma, lambda);
      const double b = lambda + gamma - 1.0;
      const double exact = (-b + std::sqrt(b * b + 4.0 * lambda)) / (2.0 * lambda);
      closed = std::max(closed, std::abs(sol.values.v - exact) / std::max(1.0, exact));
      residual = std::max(residual, sol.residual);
      for (const auto* h : {&iso, &ar1}) {
        const auto tv = spectral::solve_silverstein(*h, gamma, lambda);
        const double step = 1e-5 * lambda;
        const double fd = (spectral::solve_silverstein(*h, gamma, lambda - step).v -
                           spectral::solve_silverstein(*h, gamma, lambda + step).v) /
                          (2.0 * step);
        deriv = std::max(deriv, std::abs(fd - tv.v_prime) / std::abs(tv.v_prime));
      }
    }
  }
  v.require(closed <= 1e-9, fmt("closed form %.2e > 1e-9", closed));
  v.require(residual <= 1e-10, fmt("residual %.2e > 1e-10", residual));
  v.require(deriv <= 1e-5, fmt("v' relative %.2e > 1e-5", deriv));
  v.note(fmt("closed form %.1e residual %.1e v' %.1e", closed, residual, deriv));
  return v;
}

struct Run {
  montecarlo::ExperimentConfig config;
  montecarlo::ReplicationTable table;
  std::vector<montecarlo::SummaryRow> summary;
};

std::vector<Run> run_family(const std::string& tag) {
  std::vector<Run> out;
  for (const auto& config : montecarlo::figure_configs(tag)) {
    if (tag.find('_') == std::string::npos && config.figure_tag != tag) continue;
    auto table = montecarlo::run(config, workers());
    auto summary = montecarlo::summarize(table);
    out.push_back({config, std::move(table), std::move(summary)});
  }
  return out;
}

Verdict criterion_bias_tsls() {
  Verdict v;
  double worst = 0.0;
  for (const auto& r : run_family("fig1")) {
    const double gamma = r.config.params.gamma();
    for (const auto& s : r.summary) {
      if (s.method == McMethod::ols) {
        const double target = gamma < 1.0 ? 0.126316 : 0.082759;
        v.require(std::abs(s.bias - target) <= 3.0 * s.se,
                  fmt("ols gamma %.2f bias %.5f vs %.6f (se %.5f)", gamma, s.bias, target, s.se));
        v.note(fmt("ols gamma %.2f bias %.4f se %.4f", gamma, s.bias, s.se));
        continue;
      }
      const double tol = std::max(0.02, 3.0 * s.se);
      const double gap = std::abs(s.bias - s.theory);
      worst = std::max(worst, gap / tol);
      v.require(gap <= tol, fmt("%s gamma %.2f lambda %.3f bias %.4f theory %.4f", std::string(to_string(s.method)).c_str(),
                                gamma, s.lambda, s.bias, s.theory));
    }
  }
  v.note(fmt("worst gap / tolerance %.2f", worst));
  return v;
}

Verdict criterion_bias_adjusted() {
  Verdict v;
  double worst = 0.0;
  for (const auto& r : run_family("fig2")) {
    const double gamma = r.config.params.gamma();
    for (const auto& s : r.summary) {
      if (s.method != McMethod::ba_tsls_ridge) continue;
      if (s.lambda == 0.0) {
        v.note(fmt("lambda 0 gamma %.2f bias %.4f (not asserted)", gamma, s.bias));
        continue;
      }
      const double tol = std::max(0.02, 3.0 * s.se);
      worst = std::max(worst, std::abs(s.bias) / tol);
      v.require(std::abs(s.bias) <= tol, fmt("gamma %.2f lambda %.3f bias %.4f", gamma, s.lambda, s.bias));
    }
  }
  v.note(fmt("worst |bias| / tolerance %.2f", worst));
  return v;
}

Verdict criterion_signal() {
  Verdict v;
  double worst = 0.0;
  for (const auto& r : run_family("fig3")) {
    const double gamma = r.config.params.gamma();
    const double alpha2 = r.config.params.alpha2();
    for (const auto& s : r.summary) {
      if (gamma > 1.0 && s.lambda == 0.0) {
        v.require(s.n_flagged == r.config.replications,
                  fmt("gamma %.2f lambda 0: %d of %d cells flagged", gamma, s.n_flagged, r.config.replications));
        v.require(s.theory == 0.0, "f(0) at gamma 1.25 is not zero");
        continue;
      }
      const double tol = std::max(0.05 * alpha2, 3.0 * s.se);
      worst = std::max(worst, std::abs(s.mean - s.theory) / tol);
      v.require(std::abs(s.mean - s.theory) <= tol,
                fmt("gamma %.2f lambda %.3f signal %.4f theory %.4f", gamma, s.lambda, s.mean, s.theory));
    }

    const auto H = spectral::psd_point_mass(1.0);
    const double h = 1e-4;
    const double slope =
        (theory::signal_f(spectral::solve_silverstein(H, gamma, 2 * h)) - theory::signal_f(spectral::solve_silverstein(H, gamma, h))) / h;
    if (gamma == 0.5) {
      // Boundary case: the first-order term vanishes.
      v.require(std::abs(slope) <= 1e-2, fmt("gamma 0.5 slope %.3e not flat", slope));
    } else {
      v.require((slope > 0.0) == (gamma > 0.5), fmt("gamma %.2f slope %.3e has the wrong sign", gamma, slope));
    }
    v.note(fmt("slope(%.2f) %.3g", gamma, slope));
  }
  v.note(fmt("worst gap / tolerance %.2f", worst));
  return v;
}

Verdict criterion_variance() {
  Verdict v;
  auto p = dgp::ModelParams{};
  p.n = 200;
  p.k = 150;
  const auto sp = p.structural();
  const double near_zero = theory::asy_variance_ba_ridge(sp, spectral::solve_silverstein(spectral::psd_point_mass(1.0), 0.75, 1e-8));
  v.require(std::abs(near_zero / 0.0027840 - 1.0) <= 1e-4, fmt("asy_variance(1e-8) %.7f vs 0.0027840", near_zero));
  v.note(fmt("asy_variance(1e-8) %.7f", near_zero));

  for (const std::string tag : {"fig4", "fig4_ar1"}) {
    for (const auto& r : run_family(tag)) {
      const double gamma = r.config.params.gamma();
      double lo = 1e9, hi = 0.0;
      for (const auto& s : r.summary) {
        if (s.method == McMethod::nagar || s.method == McMethod::liml) {
          if (!std::isnan(s.theory)) v.note(fmt("%s %s %.2f mc/theory %.3f (not asserted)", tag.c_str(),
                                                std::string(to_string(s.method)).c_str(), gamma, s.sd * s.sd / s.theory));
          continue;
        }
        const double ratio = s.sd * s.sd / s.theory;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        v.require(std::abs(ratio - 1.0) <= 0.25, fmt("%s gamma %.2f lambda %.2f mc/theory %.3f", tag.c_str(), gamma, s.lambda, ratio));
      }
      v.note(fmt("%s gamma %.2f mc/theory in [%.3f, %.3f]", tag.c_str(), gamma, lo, hi));
    }
  }
  return v;
}

Verdict criterion_cv() {
  Verdict v;
  for (const auto& r : run_family("fig5_F5")) {
    const double gamma = r.config.params.gamma();
    const double grid_min = r.config.cv_grid.front();
    if (gamma > 1.0) {
      int total = 0, positive = 0, above_min = 0;
      for (const auto& row : r.table.rows) {
        if (row.method != McMethod::ba_tsls_ridge_cv || row.replication >= 500 || row.flagged()) continue;
        ++total;
        positive += row.lambda > 0.0;
        above_min += row.lambda > grid_min;
      }
      const double share = static_cast<double>(positive) / 500.0;
      v.require(share >= 0.95, fmt("lambda > 0 in %.3f of 500", share));
      v.note(fmt("gamma 1.25 lambda > 0 in %.3f, above the grid minimum in %.3f (%d usable)", share,
                 static_cast<double>(above_min) / 500.0, total));
    }

    const auto dens = montecarlo::density(r.table, McMethod::ba_tsls_ridge_cv, montecarlo::LambdaPolicy::cv());
    v.require(std::abs(dens.mode - r.config.params.beta) <= 0.05, fmt("gamma %.2f density mode %.4f", gamma, dens.mode));
    v.note(fmt("gamma %.2f mode %.4f", gamma, dens.mode));

    if (gamma < 1.0) {
      double var_cv = NAN, var_ba = NAN, var_liml = NAN;
      for (const auto& s : r.summary) {
        if (s.method == McMethod::ba_tsls_ridge_cv) var_cv = s.sd * s.sd;
        if (s.method == McMethod::ba_tsls_ridge && s.lambda == 0.0) var_ba = s.sd * s.sd;
        if (s.method == McMethod::liml) var_liml = s.sd * s.sd;
      }
      v.require(var_cv <= 1.1 * var_ba, fmt("var(cv) %.5f > 1.1 var(ridgeless adjusted) %.5f", var_cv, var_ba));
      v.note(fmt("var cv %.5f ridgeless adjusted %.5f liml %.5f (liml/cv %.2f, not asserted)", var_cv, var_ba, var_liml,
                 var_liml / var_cv));
    }
  }
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion_determinism() {
  Verdict v;
  const auto root = std::filesystem::temp_directory_path() / "ivridge_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::vector<montecarlo::ExperimentConfig> configs;
  for (auto c : montecarlo::figure_configs("fig1")) {
    c.replications = 40;
    configs.push_back(c);
  }
  for (auto c : montecarlo::figure_configs("fig5_F5")) {
    c.replications = 60;
    configs.push_back(c);
  }
  int files = 0;
  for (const auto& c : configs) {
    const auto a = montecarlo::run_and_write(c, 1, root / "w1");
    const auto b = montecarlo::run_and_write(c, 4, root / "w4");
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++files;
      v.require(slurp(a[i]) == slurp(b[i]), a[i].filename().string() + " differs");
    }
  }
  std::filesystem::remove_all(root);
  v.note(fmt("%d files compared across 1 and 4 workers", files));
  return v;
}

}  // namespace

int main() {
  struct Item {
    int id;
    Verdict (*check)();
  };
  const Item items[] = {{1, criterion_identities}, {2, criterion_solver},   {3, criterion_bias_tsls},
                        {4, criterion_bias_adjusted}, {5, criterion_signal}, {6, criterion_variance},
                        {7, criterion_cv},         {8, criterion_determinism}};
  int failed = 0;
  for (const auto& item : items) {
    Verdict v;
    try {
      v = item.check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("criterion %d %s %s\n", item.id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
