#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivridge/dgp.hpp"

namespace ivridge::estimators {

enum class Method { ols, tsls_ridge, ba_tsls_ridge, nagar, liml, ridgeless_tsls };

std::string_view to_string(Method method) noexcept;
/// Accepts enum spellings and the CLI names tsls, ba-tsls, ridgeless-tsls.
Method parse_method(std::string_view name);

/// |x'S x| / (x'x) below this flags a degenerate signal.
inline constexpr double kDegenerateSignal = 1e-8;

/// Normalised quadratic forms (divided by n) of x and y with the ridge
/// smoother P = I - lambda (ZZ'/n + lambda I)^{-1} and M = I - P.
///
/// The bias-adjusted smoother S = lambda v P - (1 - lambda v) M equals
/// P - s I with shrink s = 1 - lambda v, so every S form follows from the
/// P forms. At lambda = 0, P is the orthogonal projector onto col(Z) and
/// lambda_v_hat holds the zero-eigenvalue share (n - rank)/n.
struct SmootherQuadratics {
  double lambda = 0.0;
  int n = 0;
  int k = 0;
  int rank = 0;

  double xx = 0.0, xy = 0.0, yy = 0.0;
  double xPx = 0.0, xPy = 0.0, yPy = 0.0;
  double xMx = 0.0, xMy = 0.0, yMy = 0.0;
  double xPPx = 0.0, xPPy = 0.0;
  double xMMx = 0.0, xPMx = 0.0;

  double v_hat = 0.0;        // (1/n) tr (ZZ'/n + lambda I)^{-1}
  double v_hat_prime = 0.0;  // (1/n) tr (ZZ'/n + lambda I)^{-2}
  double lambda_v_hat = 0.0;
  double trace_S_over_n = 0.0;

  double gamma_n() const noexcept { return static_cast<double>(k) / n; }
  double shrink() const noexcept { return 1.0 - lambda_v_hat; }
  double xSx() const noexcept { return xPx - shrink() * xx; }
  double xSy() const noexcept { return xPy - shrink() * xy; }
  double xSSx() const noexcept { return xPPx - 2.0 * shrink() * xPx + shrink() * shrink() * xx; }
  /// lambda * m_hat through the finite-sample companion identity.
  double lambda_m_hat() const noexcept { return 1.0 - (1.0 - lambda_v_hat) / gamma_n(); }
};

/// Forms for lambda > 0 through the cached gram eigendecomposition, O(n).
SmootherQuadratics smoother_quadratics(const dgp::Dataset& data, double lambda);
/// Exact ridgeless (lambda = 0) forms via the rank-revealing projector.
SmootherQuadratics minnorm_quadratics(const dgp::Dataset& data);
/// Dispatches on lambda.
SmootherQuadratics quadratics(const dgp::Dataset& data, double lambda);

struct EstimateResult {
  Method method = Method::ols;
  double lambda = 0.0;
  double beta_hat = 0.0;
  std::optional<double> variance_hat;  // absent for the unadjusted 2SLS-Ridge
  double signal = 0.0;                 // estimator denominator divided by n
  std::map<std::string, double> diagnostics;
};

EstimateResult ols(const dgp::Dataset& data);
EstimateResult tsls_ridge(const dgp::Dataset& data, double lambda);
EstimateResult ridgeless_tsls(const dgp::Dataset& data);
/// lambda = 0 is accepted and uses the exact ridgeless smoother: Nagar's
/// P0 - (k/n) I for full-rank Z with k < n, and -M0 (zero) for k >= n.
EstimateResult ba_tsls_ridge(const dgp::Dataset& data, double lambda);
EstimateResult nagar(const dgp::Dataset& data);
EstimateResult liml(const dgp::Dataset& data);

/// Dispatch by method; lambda is ignored by the lambda-free methods.
EstimateResult estimate(const dgp::Dataset& data, Method method, double lambda);

/// The three algebraically equal forms of Nagar's estimator.
struct NagarForms {
  double projector_odds;  // (x'P0y - g/(1-g) x'M0y) / (x'P0x - g/(1-g) x'M0x)
  double weighted;        // ((1-g) x'P0y - g x'M0y) / ((1-g) x'P0x - g x'M0x)
  double centred;         // (x'P0y - g x'y) / (x'P0x - g x'x)
};
NagarForms nagar_representations(const dgp::Dataset& data);

struct VarianceEstimate {
  double value = 0.0;  // floored at zero
  double raw = 0.0;
  bool floored = false;
};

/// Bekker-type variance sigma_hat^2 x'S S x_tilde / (x'S x)^2 with
/// eps_hat = y - x beta_hat and x_tilde = x + eps_hat (eps_hat'x)/(eps_hat'eps_hat).
VarianceEstimate bekker_variance(const dgp::Dataset& data, double lambda, double beta_hat);
/// Same from precomputed forms and an explicit shrink s in S = P - s I.
VarianceEstimate bekker_variance(const SmootherQuadratics& q, double shrink, double beta_hat);

/// x'S S x_tilde / n evaluated for an arbitrary residual beta.
double sandwich_numerator(const SmootherQuadratics& q, double shrink, double beta_hat);
/// The same using S S = P P - 2 s P + s^2 I and x'P eps_hat = s x'eps_hat,
/// which holds exactly when beta_hat = x'S y / x'S x.
double sandwich_numerator_simplified(const SmootherQuadratics& q, double beta_hat);

enum class CvPlugin {
  per_lambda,      // eps_hat and x_tilde recomputed with each grid point's estimate
  fixed_residual,  // eps_hat from a single pilot estimate at the grid median
};

struct CvResult {
  double lambda_star = 0.0;
  std::size_t index = 0;
  std::vector<double> criterion;  // NaN at degenerate grid points
};

/// Minimises CV(lambda) = ln(x'S S x_tilde) - 2 ln|x'S x| over the grid.
/// Ties go to the smaller lambda.
CvResult cv_select(const dgp::Dataset& data, std::span<const double> grid,
                   CvPlugin plugin = CvPlugin::per_lambda);

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);
/// 40 log-spaced points on [1e-3, 10].
std::vector<double> default_cv_grid();

}  // namespace ivridge::estimators
