#include "ivridge/theory.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ivridge/error.hpp"

namespace ivridge::theory {

namespace {

constexpr double kDegenerate = 1e-12;

}  // namespace

void StructuralParams::validate() const {
  if (!(sigma_eps2 > 0.0) || !(sigma_nu2 > 0.0))
    fail(ErrorCode::domain, "error variances must be positive");
  if (!(sigma_eps_nu * sigma_eps_nu < sigma_eps2 * sigma_nu2))
    fail(ErrorCode::domain, "error covariance matrix must be positive definite");
  if (!(alpha2 > 0.0)) fail(ErrorCode::domain, "first-stage signal alpha^2 must be positive");
  if (!(gamma > 0.0)) fail(ErrorCode::domain, "gamma must be positive");
  if (n < 1) fail(ErrorCode::domain, "n must be positive");
}

std::string_view to_string(CurveKind kind) noexcept {
  switch (kind) {
    case CurveKind::bias_tsls_ridge: return "bias_tsls_ridge";
    case CurveKind::signal_f: return "signal_f";
    case CurveKind::amplifier_a: return "amplifier_a";
    case CurveKind::asy_variance: return "asy_variance";
  }
  return "unknown";
}

CurveKind parse_curve_kind(std::string_view name) {
  if (name == "bias_tsls_ridge" || name == "bias") return CurveKind::bias_tsls_ridge;
  if (name == "signal_f" || name == "signal") return CurveKind::signal_f;
  if (name == "amplifier_a" || name == "amplifier") return CurveKind::amplifier_a;
  if (name == "asy_variance" || name == "variance") return CurveKind::asy_variance;
  fail(ErrorCode::config, "unknown curve kind '" + std::string(name) + "'");
}

double bias_tsls_ridge_limit(const StructuralParams& params, const spectral::TransformValues& tv) {
  const double noise = 1.0 - tv.lambda_v;
  const double denom = params.alpha2 * (1.0 - tv.lambda * tv.p()) + params.sigma_nu2 * noise;
  if (std::abs(denom) < kDegenerate) fail(ErrorCode::degenerate_signal, "2SLS-Ridge bias: zero denominator");
  return params.sigma_eps_nu * noise / denom;
}

double bias_ols(const StructuralParams& params) {
  return params.sigma_eps_nu / (params.alpha2 + params.sigma_nu2);
}

double amplifier_a(const spectral::TransformValues& tv) {
  const double noise = 1.0 - tv.lambda_v;
  if (std::abs(noise) < kDegenerate) fail(ErrorCode::domain, "amplifier undefined where lambda v = 1");
  return tv.gamma * (1.0 - tv.lambda * tv.p()) / noise;
}

double signal_f(const spectral::TransformValues& tv) {
  return 1.0 - (tv.lambda + tv.gamma) * tv.p();
}

double asy_variance_ba_ridge(const StructuralParams& params, const spectral::TransformValues& tv) {
  const double f = signal_f(tv);
  if (std::abs(f) < kDegenerate)
    fail(ErrorCode::degenerate_signal, "asymptotic variance: signal f(-lambda) vanishes");
  const double p = tv.p();
  const double lam = tv.lambda;
  const double signal_part = (1.0 - params.gamma * p) * f - lam * p * (1.0 - params.gamma * p) - tv.lambda2_p_prime();
  const double noise_part = tv.lambda2_v_spread();
  const double a2 = params.alpha2;
  const double f2 = f * f;
  const double cross = params.sigma_eps2 * params.sigma_nu2 + params.sigma_eps_nu * params.sigma_eps_nu;
  return (params.sigma_eps2 / a2 * signal_part / f2 + cross / (a2 * a2) * noise_part / f2) / params.n;
}

double bekker_asy_variance(const StructuralParams& params) {
  if (!(params.gamma < 1.0)) fail(ErrorCode::unsupported, "Bekker variance requires gamma < 1");
  const double a2 = params.alpha2;
  const double cross = params.sigma_eps2 * params.sigma_nu2 + params.sigma_eps_nu * params.sigma_eps_nu;
  return (params.sigma_eps2 / a2 + params.gamma / (1.0 - params.gamma) * cross / (a2 * a2)) / params.n;
}

double esd_inverse_moment(const spectral::SpectralMeasure& H, double gamma, double lambda) {
  return spectral::solve_silverstein(H, gamma, lambda).m;
}

double evaluate(CurveKind kind, const StructuralParams& params, const spectral::TransformValues& tv) {
  switch (kind) {
    case CurveKind::bias_tsls_ridge: return bias_tsls_ridge_limit(params, tv);
    case CurveKind::signal_f: return signal_f(tv);
    case CurveKind::amplifier_a: return amplifier_a(tv);
    case CurveKind::asy_variance: return asy_variance_ba_ridge(params, tv);
  }
  fail(ErrorCode::contract, "unknown curve kind");
}

TheoryCurve curve(CurveKind kind, const StructuralParams& params, const spectral::SpectralMeasure& H,
                  std::span<const double> lambda_grid) {
  params.validate();
  if (lambda_grid.empty()) fail(ErrorCode::contract, "theory curve needs a nonempty lambda grid");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] >= 0.0)) fail(ErrorCode::domain, "lambda grid entries must be nonnegative");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
      fail(ErrorCode::contract, "lambda grid must be strictly increasing");
  }

  TheoryCurve out;
  out.kind = kind;
  out.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
  out.values.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    try {
      const auto tv = spectral::population_transforms(H, params.gamma, lambda);
      out.values.push_back(evaluate(kind, params, tv));
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "theory curve at lambda=" << lambda << ": " << e.what();
      throw SolverError(msg.str(), e.residual());
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "theory curve at lambda=" << lambda << ": " << e.what();
      throw Error(e.code(), msg.str());
    }
  }
  return out;
}

}  // namespace ivridge::theory
