#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ivridge/spectral.hpp"

namespace ivridge::theory {

/// Structural parameters of the simultaneous-equations model in the limit.
struct StructuralParams {
  double sigma_eps2 = 1.0;
  double sigma_nu2 = 1.0;
  double sigma_eps_nu = 0.0;
  double alpha2 = 1.0;  // first-stage signal, k * Var(pi_j)
  double gamma = 0.5;   // k / n
  int n = 1;

  /// Throws domain errors when the error covariance is not positive definite
  /// or the first-stage signal vanishes.
  void validate() const;

  /// Concentration parameter n alpha^2 / sigma_nu^2.
  double mu2() const noexcept { return n * alpha2 / sigma_nu2; }
  /// Population first-stage F = mu^2 / k = alpha^2 / (gamma sigma_nu^2).
  double f_stat() const noexcept { return alpha2 / (gamma * sigma_nu2); }
};

enum class CurveKind { bias_tsls_ridge, signal_f, amplifier_a, asy_variance };

std::string_view to_string(CurveKind kind) noexcept;
/// Accepts the enum spelling plus the short aliases bias, signal, amplifier, variance.
CurveKind parse_curve_kind(std::string_view name);

struct TheoryCurve {
  std::vector<double> lambdas;
  std::vector<double> values;
  CurveKind kind = CurveKind::bias_tsls_ridge;
};

/// Almost-sure limit of the 2SLS-Ridge bias:
/// sigma_eps_nu (1 - lambda v) / [alpha^2 (1 - lambda p) + sigma_nu^2 (1 - lambda v)].
double bias_tsls_ridge_limit(const StructuralParams& params, const spectral::TransformValues& tv);

/// OLS bias sigma_eps_nu / (alpha^2 + sigma_nu^2).
double bias_ols(const StructuralParams& params);

/// Ridge amplifier of the first-stage F, gamma (1 - lambda p) / (1 - lambda v).
double amplifier_a(const spectral::TransformValues& tv);

/// Normalised limit of x'S_lambda x / (n alpha^2): 1 - (lambda + gamma) p.
double signal_f(const spectral::TransformValues& tv);

/// Limit variance of the bias-adjusted 2SLS-Ridge estimator (already divided by n).
double asy_variance_ba_ridge(const StructuralParams& params, const spectral::TransformValues& tv);

/// Closed-form many-instrument variance of the standard bias-adjusted 2SLS
/// (gamma < 1): (1/n)(s_ee/a2 + gamma/(1-gamma) (s_ee s_vv + s_ev^2)/a2^2).
double bekker_asy_variance(const StructuralParams& params);

/// E[1/Y] over the limit sample spectrum, evaluated at a small ridge penalty.
/// Diagnostic for the amplifier-slope condition E[1/Y] >= 1.
double esd_inverse_moment(const spectral::SpectralMeasure& H, double gamma, double lambda = 1e-6);

/// Element-wise evaluation over an ascending lambda grid. lambda = 0 entries
/// use the ridgeless limits; solver failures name the offending lambda.
TheoryCurve curve(CurveKind kind, const StructuralParams& params, const spectral::SpectralMeasure& H,
                  std::span<const double> lambda_grid);

/// Evaluate one curve kind from already-solved transforms.
double evaluate(CurveKind kind, const StructuralParams& params, const spectral::TransformValues& tv);

}  // namespace ivridge::theory
