#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ivridge::spectral {

/// Discrete probability measure on [0, inf).
///
/// Represents a population spectral distribution H as well as the empirical
/// spectrum of a sample covariance matrix. Points are kept sorted ascending.
class SpectralMeasure {
 public:
  SpectralMeasure(std::vector<double> points, std::vector<double> weights);

  /// Uniform weights 1/size over the given points.
  static SpectralMeasure uniform(std::vector<double> points);

  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }
  double min_point() const noexcept { return points_.front(); }
  double max_point() const noexcept { return points_.back(); }
  double mean() const noexcept;

  /// Sum of w_i * fn(t_i).
  template <class Fn>
  double expect(Fn&& fn) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) acc += weights_[i] * fn(points_[i]);
    return acc;
  }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Stieltjes transform m(-lambda) of the sample covariance spectrum, its
/// companion v(-lambda) over the n x n gram spectrum, and derivatives in the
/// argument (m' = E[1/(Y+lambda)^2]).
///
/// The products lambda*m, lambda*v, lambda^2*m', lambda^2*v' are stored
/// alongside the raw values. At lambda = 0 they carry the ridgeless limits
/// while the raw values may be infinite.
struct TransformValues {
  double lambda = 0.0;
  double gamma = 0.0;
  double m = 0.0;
  double v = 0.0;
  double m_prime = 0.0;
  double v_prime = 0.0;
  double lambda_m = 0.0;
  double lambda_v = 0.0;
  double lambda2_m_prime = 0.0;
  double lambda2_v_prime = 0.0;

  /// p(-lambda) = 1 - lambda * m(-lambda).
  double p() const noexcept { return 1.0 - lambda_m; }
  /// lambda^2 * p'(-lambda) with p' = -(m - lambda m').
  double lambda2_p_prime() const noexcept { return -lambda * (lambda_m - lambda2_m_prime); }
  /// lambda^2 v' - lambda^2 v^2, a variance over the companion spectrum.
  double lambda2_v_spread() const noexcept { return lambda2_v_prime - lambda_v * lambda_v; }
};

SpectralMeasure psd_point_mass(double t);

/// Limit spectrum of an equicorrelated covariance (1-rho) I + rho 11': a point
/// mass at 1 - rho; the single spiked eigenvalue has vanishing weight.
SpectralMeasure psd_equicorrelated(double rho_z);

/// Eigenvalues (equal weights) of the grid_size x grid_size AR-1 correlation
/// matrix rho^|i-j|, used as a discretisation of the limit spectrum.
SpectralMeasure psd_ar1(double rho_z, std::size_t grid_size = 2000);

/// E[1 / (Y + lambda)] under the measure.
double stieltjes_m(const SpectralMeasure& measure, double lambda);

/// Finite-sample transforms from the k eigenvalues of Z'Z/n.
///
/// The n-list of ZZ'/n is obtained by padding with zeros (n > k) or
/// dropping the k - n smallest entries (k > n), so the companion identity
/// holds up to rounding.
TransformValues empirical_transforms(std::span<const double> covariance_eigenvalues,
                                     std::size_t n, std::size_t k, double lambda);

/// Same, starting from the n eigenvalues of the gram matrix ZZ'/n.
TransformValues empirical_transforms_from_gram(std::span<const double> gram_eigenvalues,
                                               std::size_t n, std::size_t k, double lambda);

/// v = [1 - gamma (1 - lambda m)] / lambda; lambda must be positive.
double companion_from_m(double m, double gamma, double lambda);

/// Product form lambda v = 1 - gamma (1 - lambda m); valid at lambda = 0.
double companion_lambda_v(double lambda_m, double gamma);

struct SilversteinSolution {
  TransformValues values;
  double residual = 0.0;  // |1/v - lambda - gamma * int t/(1+tv) dH|
  int iterations = 0;
  bool bisection = false;
};

inline constexpr double kSilversteinTolerance = 1e-10;
inline constexpr int kSilversteinMaxIterations = 10'000;

/// Solves 1/v = lambda + gamma * int t/(1+tv) dH(t) for v = v(-lambda).
SilversteinSolution solve_silverstein_report(const SpectralMeasure& H, double gamma, double lambda);
TransformValues solve_silverstein(const SpectralMeasure& H, double gamma, double lambda);

/// Signed residual 1/v - lambda - gamma * int t/(1+tv) dH(t).
double silverstein_residual(const SpectralMeasure& H, double gamma, double lambda, double v);

/// lambda v(-lambda) for isotropic instruments (H = point mass at 1).
double isotropic_lambda_v(double gamma, double lambda);

struct RidgelessLimits {
  double lambda_v;
  double lambda_m;
};

/// Limits of lambda v and lambda m as lambda -> 0. Rejects gamma == 1.
RidgelessLimits ridgeless_limits(double gamma);

/// TransformValues at lambda = 0 built from the ridgeless limits; raw m, v
/// and derivatives that diverge are reported as +infinity.
TransformValues ridgeless_transforms(double gamma);

/// ridgeless_transforms for lambda == 0, solve_silverstein otherwise.
TransformValues population_transforms(const SpectralMeasure& H, double gamma, double lambda);

}  // namespace ivridge::spectral
