#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ivridge/spectral.hpp"
#include "ivridge/theory.hpp"

namespace ivridge::dgp {

enum class SigmaKind { isotropic, ar1, equicorrelated };

std::string_view to_string(SigmaKind kind) noexcept;

/// Instrument covariance Sigma. rho_z is ignored for the isotropic kind.
struct SigmaSpec {
  SigmaKind kind = SigmaKind::isotropic;
  double rho_z = 0.0;

  void validate() const;
  /// "isotropic", "ar1:0.5", "equicorrelated:0.3"
  static SigmaSpec parse(std::string_view text);
  std::string label() const;
};

/// k x k covariance matrix. All kinds have unit diagonal, so tr(Sigma)/k = 1.
Eigen::MatrixXd sigma_matrix(const SigmaSpec& spec, int k);

/// Lower Cholesky factor L with L L' = Sigma.
Eigen::MatrixXd sigma_sqrt(const SigmaSpec& spec, int k);

/// Limit population spectrum H used by the theory overlays.
spectral::SpectralMeasure population_spectrum(const SigmaSpec& spec, std::size_t grid_size = 2000);

/// Simulation design: y = beta x + eps, x = Z pi + nu, unit error variances,
/// corr(eps, nu) = rho and alpha^2 = (k/n) F.
struct ModelParams {
  double beta = 0.0;
  double rho = 0.6;
  int n = 200;
  int k = 150;
  double f_stat = 5.0;
  SigmaSpec sigma{};
  std::uint64_t seed = 0;

  void validate() const;
  double gamma() const noexcept { return static_cast<double>(k) / n; }
  double alpha2() const noexcept { return gamma() * f_stat; }
  double sigma_pi2() const noexcept { return alpha2() / k; }
  theory::StructuralParams structural() const;
};

struct Concentration {
  double mu2;
  double f;
};

/// mu^2 = n alpha^2 / sigma_nu^2 and F = mu^2 / k.
Concentration concentration(const ModelParams& params);

/// Seed of replication `index` derived from `base_seed` (SplitMix64 step).
std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

/// One sample (y, x, Z) with the eigendecomposition of ZZ'/n cached.
///
/// Immutable after construction. Every smoother quadratic form is computed
/// in the gram eigenbasis, so the rotated outcome vectors U'x and U'y are
/// cached as well.
class Dataset {
 public:
  Dataset(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::MatrixXd Z,
          std::optional<ModelParams> params = std::nullopt);

  int n() const noexcept { return static_cast<int>(y_.size()); }
  int k() const noexcept { return static_cast<int>(Z_.cols()); }
  double gamma_n() const noexcept { return static_cast<double>(k()) / n(); }

  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::VectorXd& x() const noexcept { return x_; }
  const Eigen::MatrixXd& Z() const noexcept { return Z_; }
  const std::optional<ModelParams>& params() const noexcept { return params_; }

  /// Eigenvalues of ZZ'/n, ascending, clamped at zero.
  const Eigen::VectorXd& gram_values() const noexcept { return gram_values_; }
  /// Orthonormal eigenvectors, column j belongs to gram_values()(j).
  const Eigen::MatrixXd& gram_vectors() const noexcept { return gram_vectors_; }
  const Eigen::VectorXd& x_rotated() const noexcept { return x_rot_; }
  const Eigen::VectorXd& y_rotated() const noexcept { return y_rot_; }

  /// Eigenvalues above n * eps * max eigenvalue count as nonzero.
  double rank_tolerance() const noexcept;
  int gram_rank() const noexcept;

 private:
  Eigen::VectorXd y_;
  Eigen::VectorXd x_;
  Eigen::MatrixXd Z_;
  std::optional<ModelParams> params_;
  Eigen::VectorXd gram_values_;
  Eigen::MatrixXd gram_vectors_;
  Eigen::VectorXd x_rot_;
  Eigen::VectorXd y_rot_;
};

/// Draws one dataset. Normal variates come from Boost's ziggurat
/// normal_distribution driven by std::mt19937_64 seeded with params.seed,
/// consumed in the fixed order W (row-major), pi, nu, w.
Dataset generate(const ModelParams& params);

/// CSV with header y,x,z1..zk.
Dataset read_csv(const std::filesystem::path& path);
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace ivridge::dgp
