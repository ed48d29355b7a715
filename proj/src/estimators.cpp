#include "ivridge/estimators.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ivridge/error.hpp"

namespace ivridge::estimators {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Accumulates the quadratic forms from per-eigenvalue weights of P and M.
template <class Weights>
SmootherQuadratics accumulate(const dgp::Dataset& data, double lambda, Weights&& weights) {
  SmootherQuadratics q;
  q.lambda = lambda;
  q.n = data.n();
  q.k = data.k();
  q.rank = data.gram_rank();

  const auto& xr = data.x_rotated();
  const auto& yr = data.y_rotated();
  for (Eigen::Index j = 0; j < xr.size(); ++j) {
    const auto [p, m] = weights(data.gram_values()(j));
    const double xj = xr(j);
    const double yj = yr(j);
    q.xPx += p * xj * xj;
    q.xPy += p * xj * yj;
    q.yPy += p * yj * yj;
    q.xMx += m * xj * xj;
    q.xMy += m * xj * yj;
    q.yMy += m * yj * yj;
    q.xPPx += p * p * xj * xj;
    q.xPPy += p * p * xj * yj;
    q.xMMx += m * m * xj * xj;
    q.xPMx += p * m * xj * xj;
  }
  const double inv_n = 1.0 / q.n;
  for (double* f : {&q.xPx, &q.xPy, &q.yPy, &q.xMx, &q.xMy, &q.yMy, &q.xPPx, &q.xPPy, &q.xMMx, &q.xPMx})
    *f *= inv_n;
  q.xx = data.x().squaredNorm() * inv_n;
  q.xy = data.x().dot(data.y()) * inv_n;
  q.yy = data.y().squaredNorm() * inv_n;
  return q;
}

void require_signal(double denom, double xx, const char* what) {
  if (!(std::abs(denom) >= kDegenerateSignal * xx)) {
    std::ostringstream msg;
    msg << what << ": degenerate signal (|denominator| = " << std::abs(denom) << ")";
    fail(ErrorCode::degenerate_signal, msg.str());
  }
}

// Moment-based first-stage diagnostics from x'P x and x'M x:
// x'Px/n ~ a2 (1 - lambda p) + s2 (1 - lambda v), x'Mx/n ~ a2 lambda p + s2 lambda v.
void first_stage_diagnostics(const SmootherQuadratics& q, EstimateResult& r) {
  const double lv = q.lambda_v_hat;
  const double lp = q.lambda * (1.0 - q.lambda_m_hat());
  const double f_hat = lv - lp;
  r.diagnostics["v_hat"] = q.v_hat;
  r.diagnostics["lambda_v_hat"] = lv;
  r.diagnostics["lambda_m_hat"] = q.lambda > 0.0 ? q.lambda_m_hat() : 0.0;
  r.diagnostics["trace_S_over_n"] = q.trace_S_over_n;
  r.diagnostics["rank"] = q.rank;
  if (std::abs(f_hat) > 1e-12 && lv > 1e-12) {
    const double alpha2 = (q.xPx * lv - q.xMx * (1.0 - lv)) / f_hat;
    const double sigma_nu2 = (q.xMx - alpha2 * lp) / lv;
    r.diagnostics["signal_f_hat"] = f_hat;
    r.diagnostics["alpha2_hat"] = alpha2;
    r.diagnostics["sigma_nu2_hat"] = sigma_nu2;
    r.diagnostics["f_hat_stat"] = alpha2 / (q.gamma_n() * sigma_nu2);
  } else {
    r.diagnostics["f_hat_stat"] = kNaN;
  }
}

void attach_variance(EstimateResult& r, const VarianceEstimate& var) {
  r.variance_hat = var.value;
  r.diagnostics["variance_raw"] = var.raw;
  r.diagnostics["variance_floored"] = var.floored ? 1.0 : 0.0;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::ols: return "ols";
    case Method::tsls_ridge: return "tsls_ridge";
    case Method::ba_tsls_ridge: return "ba_tsls_ridge";
    case Method::nagar: return "nagar";
    case Method::liml: return "liml";
    case Method::ridgeless_tsls: return "ridgeless_tsls";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "ols") return Method::ols;
  if (name == "tsls" || name == "tsls_ridge") return Method::tsls_ridge;
  if (name == "ba-tsls" || name == "ba_tsls" || name == "ba_tsls_ridge") return Method::ba_tsls_ridge;
  if (name == "nagar") return Method::nagar;
  if (name == "liml") return Method::liml;
  if (name == "ridgeless-tsls" || name == "ridgeless_tsls") return Method::ridgeless_tsls;
  fail(ErrorCode::config, "unknown method '" + std::string(name) + "'");
}

SmootherQuadratics smoother_quadratics(const dgp::Dataset& data, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::domain, "smoother_quadratics needs lambda > 0; use minnorm_quadratics at lambda = 0");
  double inv_sum = 0.0, inv_sq_sum = 0.0, p_sum = 0.0, m_sum = 0.0;
  auto q = accumulate(data, lambda, [&](double mu) {
    const double r = 1.0 / (mu + lambda);
    inv_sum += r;
    inv_sq_sum += r * r;
    const double p = mu * r;
    const double m = lambda * r;
    p_sum += p;
    m_sum += m;
    return std::pair{p, m};
  });
  const double n = q.n;
  q.v_hat = inv_sum / n;
  q.v_hat_prime = inv_sq_sum / n;
  q.lambda_v_hat = m_sum / n;
  q.trace_S_over_n = p_sum / n - q.shrink();
  return q;
}

SmootherQuadratics minnorm_quadratics(const dgp::Dataset& data) {
  const double tol = data.rank_tolerance();
  double p_sum = 0.0, inv_sum = 0.0, inv_sq_sum = 0.0;
  auto q = accumulate(data, 0.0, [&](double mu) {
    const bool kept = mu > tol;
    if (kept) {
      p_sum += 1.0;
      inv_sum += 1.0 / mu;
      inv_sq_sum += 1.0 / (mu * mu);
    }
    return std::pair{kept ? 1.0 : 0.0, kept ? 0.0 : 1.0};
  });
  const double n = q.n;
  const bool full = q.rank == q.n;
  q.v_hat = full ? inv_sum / n : kInf;
  q.v_hat_prime = full ? inv_sq_sum / n : kInf;
  q.lambda_v_hat = (n - q.rank) / n;
  q.trace_S_over_n = p_sum / n - q.shrink();
  return q;
}

SmootherQuadratics quadratics(const dgp::Dataset& data, double lambda) {
  if (lambda == 0.0) return minnorm_quadratics(data);
  return smoother_quadratics(data, lambda);
}

double sandwich_numerator(const SmootherQuadratics& q, double shrink, double beta_hat) {
  const double s = shrink;
  const double ee = q.yy - 2.0 * beta_hat * q.xy + beta_hat * beta_hat * q.xx;
  const double xe = q.xy - beta_hat * q.xx;
  const double xSSx = q.xPPx - 2.0 * s * q.xPx + s * s * q.xx;
  const double xPPe = q.xPPy - beta_hat * q.xPPx;
  const double xPe = q.xPy - beta_hat * q.xPx;
  const double xSSe = xPPe - 2.0 * s * xPe + s * s * xe;
  if (ee <= 0.0) return xSSx;
  return xSSx + xSSe * xe / ee;
}

double sandwich_numerator_simplified(const SmootherQuadratics& q, double beta_hat) {
  const double s = q.shrink();
  const double ee = q.yy - 2.0 * beta_hat * q.xy + beta_hat * beta_hat * q.xx;
  const double xe = q.xy - beta_hat * q.xx;
  const double xPPe = q.xPPy - beta_hat * q.xPPx;
  if (ee <= 0.0) return q.xSSx();
  return q.xSSx() + (xPPe - s * s * xe) * xe / ee;
}

VarianceEstimate bekker_variance(const SmootherQuadratics& q, double shrink, double beta_hat) {
  const double xSx = q.xPx - shrink * q.xx;
  require_signal(xSx, q.xx, "bekker_variance");
  const double sigma2 = q.yy - 2.0 * beta_hat * q.xy + beta_hat * beta_hat * q.xx;
  const double numer = sandwich_numerator(q, shrink, beta_hat);
  VarianceEstimate out;
  out.raw = sigma2 * numer / (q.n * xSx * xSx);
  out.floored = !(out.raw >= 0.0);
  out.value = out.floored ? 0.0 : out.raw;
  return out;
}

VarianceEstimate bekker_variance(const dgp::Dataset& data, double lambda, double beta_hat) {
  const auto q = quadratics(data, lambda);
  return bekker_variance(q, q.shrink(), beta_hat);
}

EstimateResult ols(const dgp::Dataset& data) {
  const double xx = data.x().squaredNorm();
  if (!(xx > 0.0)) fail(ErrorCode::degenerate_signal, "ols: x is identically zero");
  EstimateResult r;
  r.method = Method::ols;
  r.beta_hat = data.x().dot(data.y()) / xx;
  const Eigen::VectorXd e = data.y() - r.beta_hat * data.x();
  r.variance_hat = (e.squaredNorm() / data.n()) / xx;
  r.signal = xx / data.n();
  return r;
}

EstimateResult tsls_ridge(const dgp::Dataset& data, double lambda) {
  if (!(lambda >= 0.0)) fail(ErrorCode::domain, "lambda must be nonnegative");
  const auto q = quadratics(data, lambda);
  require_signal(q.xPx, q.xx, "tsls_ridge");
  EstimateResult r;
  r.method = Method::tsls_ridge;
  r.lambda = lambda;
  r.beta_hat = q.xPy / q.xPx;
  r.signal = q.xPx;
  first_stage_diagnostics(q, r);
  return r;
}

EstimateResult ridgeless_tsls(const dgp::Dataset& data) {
  auto r = tsls_ridge(data, 0.0);
  r.method = Method::ridgeless_tsls;
  return r;
}

EstimateResult ba_tsls_ridge(const dgp::Dataset& data, double lambda) {
  if (!(lambda >= 0.0)) fail(ErrorCode::domain, "lambda must be nonnegative");
  const auto q = quadratics(data, lambda);
  require_signal(q.xSx(), q.xx, "ba_tsls_ridge");
  EstimateResult r;
  r.method = Method::ba_tsls_ridge;
  r.lambda = lambda;
  r.beta_hat = q.xSy() / q.xSx();
  r.signal = q.xSx();
  first_stage_diagnostics(q, r);
  attach_variance(r, bekker_variance(q, q.shrink(), r.beta_hat));
  return r;
}

NagarForms nagar_representations(const dgp::Dataset& data) {
  if (data.k() >= data.n())
    fail(ErrorCode::unsupported, "nagar: unsupported: gamma >= 1 (k >= n)");
  const auto q = minnorm_quadratics(data);
  const double g = q.gamma_n();
  const double odds = g / (1.0 - g);
  NagarForms f;
  f.projector_odds = (q.xPy - odds * q.xMy) / (q.xPx - odds * q.xMx);
  f.weighted = ((1.0 - g) * q.xPy - g * q.xMy) / ((1.0 - g) * q.xPx - g * q.xMx);
  f.centred = (q.xPy - g * q.xy) / (q.xPx - g * q.xx);
  return f;
}

EstimateResult nagar(const dgp::Dataset& data) {
  if (data.k() >= data.n())
    fail(ErrorCode::unsupported, "nagar: unsupported: gamma >= 1 (k >= n)");
  const auto q = minnorm_quadratics(data);
  const double g = q.gamma_n();
  const double denom = q.xPx - g * q.xx;
  require_signal(denom, q.xx, "nagar");
  EstimateResult r;
  r.method = Method::nagar;
  r.beta_hat = (q.xPy - g * q.xy) / denom;
  r.signal = denom;
  first_stage_diagnostics(q, r);
  attach_variance(r, bekker_variance(q, g, r.beta_hat));
  return r;
}

EstimateResult liml(const dgp::Dataset& data) {
  if (data.k() >= data.n())
    fail(ErrorCode::unsupported, "liml: unsupported benchmark for gamma >= 1 (k >= n)");
  const auto q = minnorm_quadratics(data);

  // Smallest root of det(W'P0W - kappa W'M0W) = 0 for W = [y x].
  Eigen::Matrix2d A, B;
  A << q.yPy, q.xPy, q.xPy, q.xPx;
  B << q.yMy, q.xMy, q.xMy, q.xMx;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> ges(A, B);
  if (ges.info() != Eigen::Success)
    fail(ErrorCode::degenerate_signal, "liml: residual moment matrix is not positive definite");
  const double kappa = std::max(ges.eigenvalues()(0), 0.0);
  const double kappa_tilde = kappa / (1.0 + kappa);

  const double denom = q.xPx - kappa_tilde * q.xx;
  require_signal(denom, q.xx, "liml");
  EstimateResult r;
  r.method = Method::liml;
  r.beta_hat = (q.xPy - kappa_tilde * q.xy) / denom;
  r.signal = denom;
  r.diagnostics["kappa"] = kappa;
  r.diagnostics["kappa_tilde"] = kappa_tilde;
  first_stage_diagnostics(q, r);
  attach_variance(r, bekker_variance(q, kappa_tilde, r.beta_hat));
  return r;
}

EstimateResult estimate(const dgp::Dataset& data, Method method, double lambda) {
  switch (method) {
    case Method::ols: return ols(data);
    case Method::tsls_ridge: return tsls_ridge(data, lambda);
    case Method::ba_tsls_ridge: return ba_tsls_ridge(data, lambda);
    case Method::nagar: return nagar(data);
    case Method::liml: return liml(data);
    case Method::ridgeless_tsls: return ridgeless_tsls(data);
  }
  fail(ErrorCode::contract, "unknown method");
}

CvResult cv_select(const dgp::Dataset& data, std::span<const double> grid, CvPlugin plugin) {
  if (grid.empty()) fail(ErrorCode::contract, "cv_select needs a nonempty grid");
  for (double lambda : grid)
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::domain, "cv grid entries must be positive");

  std::vector<SmootherQuadratics> forms;
  forms.reserve(grid.size());
  for (double lambda : grid) forms.push_back(smoother_quadratics(data, lambda));
  auto usable = [&](const SmootherQuadratics& q) {
    return std::abs(q.xSx()) >= kDegenerateSignal * q.xx;
  };

  double pilot_beta = kNaN;
  if (plugin == CvPlugin::fixed_residual) {
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return grid[a] < grid[b]; });
    for (std::size_t pos = order.size() / 2; pos < order.size(); ++pos) {
      const auto& q = forms[order[pos]];
      if (usable(q)) {
        pilot_beta = q.xSy() / q.xSx();
        break;
      }
    }
    if (std::isnan(pilot_beta)) fail(ErrorCode::degenerate_signal, "cv_select: no usable pilot estimate");
  }

  CvResult out;
  out.criterion.assign(grid.size(), kNaN);
  bool found = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& q = forms[i];
    if (!usable(q)) continue;
    const double beta = plugin == CvPlugin::fixed_residual ? pilot_beta : q.xSy() / q.xSx();
    const double numer = q.n * sandwich_numerator(q, q.shrink(), beta);
    if (!(numer > 0.0)) continue;
    const double value = std::log(numer) - 2.0 * std::log(q.n * std::abs(q.xSx()));
    out.criterion[i] = value;
    const bool better = !found || value < out.criterion[out.index] ||
                        (value == out.criterion[out.index] && grid[i] < grid[out.index]);
    if (better) {
      out.index = i;
      found = true;
    }
  }
  if (!found) fail(ErrorCode::degenerate_signal, "cv_select: every grid point is degenerate");
  out.lambda_star = grid[out.index];
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) fail(ErrorCode::domain, "log grid needs 0 < lo <= hi and points >= 1");
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_cv_grid() { return log_grid(1e-3, 10.0, 40); }

}  // namespace ivridge::estimators
