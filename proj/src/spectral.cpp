#include "ivridge/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ivridge/error.hpp"

namespace ivridge::spectral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Integrals of the Silverstein map at a given v.
struct SilversteinTerms {
  double t_over = 0.0;      // int t/(1+tv) dH
  double t2_over_sq = 0.0;  // int t^2/(1+tv)^2 dH
  double t_over_sq = 0.0;   // int t/(1+tv)^2 dH
  double inv = 0.0;         // int 1/(1+tv) dH
};

SilversteinTerms silverstein_terms(const SpectralMeasure& H, double v) {
  SilversteinTerms s;
  const auto t = H.points();
  const auto w = H.weights();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = 1.0 / (1.0 + t[i] * v);
    s.t_over += w[i] * t[i] * d;
    s.t2_over_sq += w[i] * t[i] * t[i] * d * d;
    s.t_over_sq += w[i] * t[i] * d * d;
    s.inv += w[i] * d;
  }
  return s;
}

// lambda v + gamma int tv/(1+tv) dH - 1: strictly increasing in v, -1 at v = 0.
double product_residual(const SpectralMeasure& H, double gamma, double lambda, double v) {
  const double ratio = H.expect([v](double t) { return t * v / (1.0 + t * v); });
  return lambda * v + gamma * ratio - 1.0;
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(ErrorCode::domain, "gamma must be positive");
}

}  // namespace

SpectralMeasure::SpectralMeasure(std::vector<double> points, std::vector<double> weights) {
  if (points.empty()) fail(ErrorCode::contract, "spectral measure needs at least one point");
  if (points.size() != weights.size())
    fail(ErrorCode::contract, "spectral measure: points and weights differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] >= 0.0) || !std::isfinite(points[i]))
      fail(ErrorCode::domain, "spectral measure points must be finite and nonnegative");
    if (!(weights[i] >= 0.0) || weights[i] > 1.0)
      fail(ErrorCode::domain, "spectral measure weights must lie in [0, 1]");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::domain, "spectral measure weights must sum to 1");

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  points_.reserve(points.size());
  weights_.reserve(points.size());
  for (std::size_t idx : order) {
    points_.push_back(points[idx]);
    weights_.push_back(weights[idx]);
  }
}

SpectralMeasure SpectralMeasure::uniform(std::vector<double> points) {
  const double w = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
  std::vector<double> weights(points.size(), w);
  // Rounding of 1/size can leave the sum a few ulps away from 1.
  if (!weights.empty()) {
    const double rest = std::accumulate(weights.begin(), weights.end() - 1, 0.0);
    weights.back() = 1.0 - rest;
  }
  return SpectralMeasure(std::move(points), std::move(weights));
}

double SpectralMeasure::mean() const noexcept {
  return expect([](double t) { return t; });
}

SpectralMeasure psd_point_mass(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorCode::domain, "point mass location must be positive");
  return SpectralMeasure({t}, {1.0});
}

SpectralMeasure psd_equicorrelated(double rho_z) {
  if (!(rho_z >= 0.0 && rho_z < 1.0)) fail(ErrorCode::domain, "rho_z must lie in [0, 1)");
  return psd_point_mass(1.0 - rho_z);
}

SpectralMeasure psd_ar1(double rho_z, std::size_t grid_size) {
  if (!(rho_z >= 0.0 && rho_z < 1.0)) fail(ErrorCode::domain, "rho_z must lie in [0, 1)");
  if (grid_size < 64) fail(ErrorCode::domain, "AR-1 grid size must be at least 64");
  if (rho_z == 0.0) return psd_point_mass(1.0);

  // The inverse of the AR-1 correlation matrix is tridiagonal:
  // (1 - rho^2) Sigma^{-1} = tridiag(-rho, [1, 1 + rho^2, ..., 1 + rho^2, 1], -rho).
  const auto N = static_cast<Eigen::Index>(grid_size);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(N, 1.0 + rho_z * rho_z);
  diag(0) = 1.0;
  diag(N - 1) = 1.0;
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(N - 1, -rho_z);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::solver, "AR-1 spectrum: eigensolver failed");

  std::vector<double> points(grid_size);
  const double scale = 1.0 - rho_z * rho_z;
  for (Eigen::Index i = 0; i < N; ++i) points[static_cast<std::size_t>(i)] = scale / solver.eigenvalues()(i);
  return SpectralMeasure::uniform(std::move(points));
}

double stieltjes_m(const SpectralMeasure& measure, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorCode::domain, "lambda must be nonnegative");
  if (lambda == 0.0 && measure.min_point() == 0.0)
    fail(ErrorCode::singularity, "Stieltjes transform at lambda = 0 with an atom at zero");
  return measure.expect([lambda](double t) { return 1.0 / (t + lambda); });
}

namespace {

TransformValues transforms_from_lists(std::span<const double> k_list, std::span<const double> n_list,
                                      std::size_t n, std::size_t k, double lambda) {
  double m = 0.0, mp = 0.0, v = 0.0, vp = 0.0;
  for (double mu : k_list) {
    const double r = 1.0 / (std::max(mu, 0.0) + lambda);
    m += r;
    mp += r * r;
  }
  for (double mu : n_list) {
    const double r = 1.0 / (std::max(mu, 0.0) + lambda);
    v += r;
    vp += r * r;
  }
  // Zero padding contributes 1/lambda per missing entry.
  const double pad_k = static_cast<double>(k - k_list.size());
  const double pad_n = static_cast<double>(n - n_list.size());
  m = (m + pad_k / lambda) / static_cast<double>(k);
  mp = (mp + pad_k / (lambda * lambda)) / static_cast<double>(k);
  v = (v + pad_n / lambda) / static_cast<double>(n);
  vp = (vp + pad_n / (lambda * lambda)) / static_cast<double>(n);

  TransformValues tv;
  tv.lambda = lambda;
  tv.gamma = static_cast<double>(k) / static_cast<double>(n);
  tv.m = m;
  tv.v = v;
  tv.m_prime = mp;
  tv.v_prime = vp;
  tv.lambda_m = lambda * m;
  tv.lambda_v = lambda * v;
  tv.lambda2_m_prime = lambda * lambda * mp;
  tv.lambda2_v_prime = lambda * lambda * vp;
  return tv;
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TransformValues empirical_transforms(std::span<const double> covariance_eigenvalues, std::size_t n,
                                     std::size_t k, double lambda) {
  if (n == 0 || k == 0) fail(ErrorCode::contract, "n and k must be positive");
  if (covariance_eigenvalues.size() != k)
    fail(ErrorCode::contract, "expected k eigenvalues of Z'Z/n");
  if (!(lambda > 0.0)) fail(ErrorCode::domain, "empirical transforms need lambda > 0");
  if (n >= k) return transforms_from_lists(covariance_eigenvalues, covariance_eigenvalues, n, k, lambda);
  // k > n: the k - n smallest eigenvalues are the structural zeros.
  const auto sorted = sorted_copy(covariance_eigenvalues);
  std::span<const double> all(sorted);
  return transforms_from_lists(all, all.subspan(k - n), n, k, lambda);
}

TransformValues empirical_transforms_from_gram(std::span<const double> gram_eigenvalues, std::size_t n,
                                               std::size_t k, double lambda) {
  if (n == 0 || k == 0) fail(ErrorCode::contract, "n and k must be positive");
  if (gram_eigenvalues.size() != n) fail(ErrorCode::contract, "expected n eigenvalues of ZZ'/n");
  if (!(lambda > 0.0)) fail(ErrorCode::domain, "empirical transforms need lambda > 0");
  if (k >= n) return transforms_from_lists(gram_eigenvalues, gram_eigenvalues, n, k, lambda);
  const auto sorted = sorted_copy(gram_eigenvalues);
  std::span<const double> all(sorted);
  return transforms_from_lists(all.subspan(n - k), all, n, k, lambda);
}

double companion_from_m(double m, double gamma, double lambda) {
  check_gamma(gamma);
  if (!(lambda > 0.0))
    fail(ErrorCode::contract, "companion_from_m divides by lambda; use companion_lambda_v at lambda = 0");
  return companion_lambda_v(lambda * m, gamma) / lambda;
}

double companion_lambda_v(double lambda_m, double gamma) {
  check_gamma(gamma);
  return 1.0 - gamma * (1.0 - lambda_m);
}

double silverstein_residual(const SpectralMeasure& H, double gamma, double lambda, double v) {
  const double integral = H.expect([v](double t) { return t / (1.0 + t * v); });
  return 1.0 / v - lambda - gamma * integral;
}

SilversteinSolution solve_silverstein_report(const SpectralMeasure& H, double gamma, double lambda) {
  check_gamma(gamma);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::domain, "Silverstein solver needs lambda > 0");

  SilversteinSolution out;
  constexpr double damping = 0.5;
  double v = 1.0 / (lambda + gamma * H.mean());
  double prev = std::abs(product_residual(H, gamma, lambda, v));
  int rising = 0;
  int it = 0;
  bool converged = false;

  // Damped fixed point v <- 1/(lambda + gamma int t/(1+tv) dH).
  for (; it < kSilversteinMaxIterations; ++it) {
    const double target = 1.0 / (lambda + gamma * H.expect([v](double t) { return t / (1.0 + t * v); }));
    v = (1.0 - damping) * v + damping * target;
    const double r = std::abs(product_residual(H, gamma, lambda, v));
    if (r <= 1e-13) {
      converged = true;
      ++it;
      break;
    }
    rising = r > prev ? rising + 1 : 0;
    prev = r;
    if (rising >= 3) break;  // oscillation
  }

  // Bracket: F(0) = -1 < 0 and F(1/lambda) = gamma int tv/(1+tv) >= 0.
  double lo = 0.0;
  double hi = 1.0 / lambda;
  if (!converged) {
    out.bisection = true;
    while (it < kSilversteinMaxIterations && (hi - lo) > 1e-15 * hi) {
      const double mid = 0.5 * (lo + hi);
      (product_residual(H, gamma, lambda, mid) < 0.0 ? lo : hi) = mid;
      ++it;
    }
    v = 0.5 * (lo + hi);
  }

  // Safeguarded Newton polish on the increasing product residual.
  for (int polish = 0; polish < 50 && it < kSilversteinMaxIterations; ++polish, ++it) {
    const double f = product_residual(H, gamma, lambda, v);
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = std::min(std::max(v, lo), hi);
    const double slope = lambda + gamma * H.expect([v](double t) {
      const double d = 1.0 + t * v;
      return t / (d * d);
    });
    double next = v - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - v) <= 4.0 * std::numeric_limits<double>::epsilon() * v) {
      v = next;
      break;
    }
    v = next;
  }

  out.iterations = it;
  out.residual = std::abs(silverstein_residual(H, gamma, lambda, v));
  if (!(out.residual <= kSilversteinTolerance) || !std::isfinite(v) || v <= 0.0) {
    std::ostringstream msg;
    msg << "Silverstein solver did not converge at lambda=" << lambda << " gamma=" << gamma
        << " (residual " << out.residual << ")";
    throw SolverError(msg.str(), out.residual);
  }

  const SilversteinTerms s = silverstein_terms(H, v);
  const double v_prime = v * v / (1.0 - gamma * v * v * s.t2_over_sq);

  TransformValues& tv = out.values;
  tv.lambda = lambda;
  tv.gamma = gamma;
  tv.v = v;
  tv.v_prime = v_prime;
  tv.lambda_v = lambda * v;
  tv.lambda2_v_prime = lambda * lambda * v_prime;
  // lambda m = int 1/(1+tv) dH, and differentiating gives lambda m' = m - v' int t/(1+tv)^2 dH.
  tv.lambda_m = s.inv;
  tv.m = s.inv / lambda;
  tv.lambda2_m_prime = s.inv - lambda * s.t_over_sq * v_prime;
  tv.m_prime = tv.lambda2_m_prime / (lambda * lambda);
  return out;
}

TransformValues solve_silverstein(const SpectralMeasure& H, double gamma, double lambda) {
  return solve_silverstein_report(H, gamma, lambda).values;
}

double isotropic_lambda_v(double gamma, double lambda) {
  check_gamma(gamma);
  if (!(lambda >= 0.0)) fail(ErrorCode::domain, "lambda must be nonnegative");
  const double b = 1.0 - gamma - lambda;
  const double disc = std::sqrt(b * b + 4.0 * lambda);
  // For b < 0 the textbook form cancels; use the conjugate 4 lambda / (disc - b) instead.
  if (b >= 0.0) return 0.5 * (b + disc);
  return 2.0 * lambda / (disc - b);
}

RidgelessLimits ridgeless_limits(double gamma) {
  check_gamma(gamma);
  if (gamma == 1.0) fail(ErrorCode::unsupported, "ridgeless limits are not defined at gamma = 1");
  if (gamma < 1.0) return {1.0 - gamma, 0.0};
  return {0.0, 1.0 - 1.0 / gamma};
}

TransformValues ridgeless_transforms(double gamma) {
  const RidgelessLimits lim = ridgeless_limits(gamma);
  TransformValues tv;
  tv.lambda = 0.0;
  tv.gamma = gamma;
  tv.lambda_v = lim.lambda_v;
  tv.lambda_m = lim.lambda_m;
  // lambda^2/(Y+lambda)^2 -> indicator of a zero eigenvalue: the zero mass of each spectrum.
  tv.lambda2_v_prime = lim.lambda_v;
  tv.lambda2_m_prime = lim.lambda_m;
  if (gamma < 1.0) {
    tv.v = kInf;
    tv.v_prime = kInf;
    tv.m = kNaN;  // E[1/Y] is finite but depends on H
    tv.m_prime = kNaN;
  } else {
    tv.m = kInf;
    tv.m_prime = kInf;
    tv.v = kNaN;
    tv.v_prime = kNaN;
  }
  return tv;
}

TransformValues population_transforms(const SpectralMeasure& H, double gamma, double lambda) {
  if (lambda > 0.0) return solve_silverstein(H, gamma, lambda);
  if (lambda < 0.0) fail(ErrorCode::domain, "lambda must be nonnegative");
  TransformValues tv = ridgeless_transforms(gamma);
  if (gamma < 1.0 && H.min_point() > 0.0) {
    // E[1/Y] = E[1/T] / (1 - gamma) below the interpolation threshold.
    tv.m = H.expect([](double t) { return 1.0 / t; }) / (1.0 - gamma);
  }
  return tv;
}

}  // namespace ivridge::spectral
