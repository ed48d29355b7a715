#include "ivridge/dgp.hpp"

#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "format.hpp"
#include "ivridge/error.hpp"

namespace ivridge::dgp {

std::string_view to_string(SigmaKind kind) noexcept {
  switch (kind) {
    case SigmaKind::isotropic: return "isotropic";
    case SigmaKind::ar1: return "ar1";
    case SigmaKind::equicorrelated: return "equicorrelated";
  }
  return "unknown";
}

void SigmaSpec::validate() const {
  if (kind != SigmaKind::isotropic && !(rho_z >= 0.0 && rho_z < 1.0))
    fail(ErrorCode::domain, "rho_z must lie in [0, 1)");
}

SigmaSpec SigmaSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  SigmaSpec spec;
  if (name == "isotropic") {
    spec.kind = SigmaKind::isotropic;
    if (colon != std::string_view::npos) fail(ErrorCode::config, "isotropic sigma takes no parameter");
    return spec;
  }
  if (name == "ar1") {
    spec.kind = SigmaKind::ar1;
  } else if (name == "equicorrelated") {
    spec.kind = SigmaKind::equicorrelated;
  } else {
    fail(ErrorCode::config, "unknown sigma kind '" + std::string(text) + "'");
  }
  if (colon == std::string_view::npos) fail(ErrorCode::config, "sigma '" + std::string(text) + "' needs :rho_z");
  const std::string value(text.substr(colon + 1));
  std::size_t used = 0;
  try {
    spec.rho_z = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) fail(ErrorCode::config, "bad rho_z in sigma '" + std::string(text) + "'");
  if (!(spec.rho_z >= 0.0 && spec.rho_z < 1.0)) fail(ErrorCode::config, "rho_z must lie in [0, 1)");
  return spec;
}

std::string SigmaSpec::label() const {
  if (kind == SigmaKind::isotropic) return "isotropic";
  return std::string(to_string(kind)) + ":" + detail::format_double(rho_z);
}

Eigen::MatrixXd sigma_matrix(const SigmaSpec& spec, int k) {
  spec.validate();
  if (k < 1) fail(ErrorCode::domain, "k must be positive");
  switch (spec.kind) {
    case SigmaKind::isotropic: return Eigen::MatrixXd::Identity(k, k);
    case SigmaKind::ar1: {
      Eigen::MatrixXd S(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) S(i, j) = std::pow(spec.rho_z, std::abs(i - j));
      return S;
    }
    case SigmaKind::equicorrelated: {
      Eigen::MatrixXd S = Eigen::MatrixXd::Constant(k, k, spec.rho_z);
      S.diagonal().setOnes();
      return S;
    }
  }
  fail(ErrorCode::contract, "unknown sigma kind");
}

Eigen::MatrixXd sigma_sqrt(const SigmaSpec& spec, int k) {
  if (spec.kind == SigmaKind::isotropic) return Eigen::MatrixXd::Identity(k, k);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_matrix(spec, k));
  if (llt.info() != Eigen::Success) fail(ErrorCode::domain, "Cholesky factorisation of Sigma failed");
  return llt.matrixL();
}

spectral::SpectralMeasure population_spectrum(const SigmaSpec& spec, std::size_t grid_size) {
  spec.validate();
  switch (spec.kind) {
    case SigmaKind::isotropic: return spectral::psd_point_mass(1.0);
    case SigmaKind::ar1: return spectral::psd_ar1(spec.rho_z, grid_size);
    case SigmaKind::equicorrelated: return spectral::psd_equicorrelated(spec.rho_z);
  }
  fail(ErrorCode::contract, "unknown sigma kind");
}

void ModelParams::validate() const {
  if (n < 2 || k < 1) fail(ErrorCode::domain, "need n >= 2 and k >= 1");
  if (!(rho > -1.0 && rho < 1.0)) fail(ErrorCode::domain, "rho must lie in (-1, 1)");
  if (!(f_stat > 0.0) || !std::isfinite(f_stat))
    fail(ErrorCode::domain, "F must be positive (alpha^2 = gamma F must not vanish)");
  if (!std::isfinite(beta)) fail(ErrorCode::domain, "beta must be finite");
  sigma.validate();
}

theory::StructuralParams ModelParams::structural() const {
  theory::StructuralParams s;
  s.sigma_eps2 = 1.0;
  s.sigma_nu2 = 1.0;
  s.sigma_eps_nu = rho;
  s.alpha2 = alpha2();
  s.gamma = gamma();
  s.n = n;
  return s;
}

Concentration concentration(const ModelParams& params) {
  params.validate();
  const double sigma_nu2 = 1.0;
  const double mu2 = params.n * params.alpha2() / sigma_nu2;
  return {mu2, mu2 / params.k};
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  std::uint64_t z = base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Dataset::Dataset(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::MatrixXd Z, std::optional<ModelParams> params)
    : y_(std::move(y)), x_(std::move(x)), Z_(std::move(Z)), params_(std::move(params)) {
  const auto n = y_.size();
  if (n < 2) fail(ErrorCode::contract, "dataset needs at least two observations");
  if (x_.size() != n || Z_.rows() != n) fail(ErrorCode::contract, "dataset dimensions disagree");
  if (Z_.cols() < 1) fail(ErrorCode::contract, "dataset needs at least one instrument");
  if (!y_.allFinite() || !x_.allFinite() || !Z_.allFinite())
    fail(ErrorCode::domain, "dataset contains non-finite values");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(Z_, 1.0 / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) fail(ErrorCode::solver, "gram eigendecomposition failed");
  gram_values_ = eig.eigenvalues().cwiseMax(0.0);
  gram_vectors_ = eig.eigenvectors();
  x_rot_ = gram_vectors_.transpose() * x_;
  y_rot_ = gram_vectors_.transpose() * y_;
}

double Dataset::rank_tolerance() const noexcept {
  const double top = gram_values_.size() > 0 ? gram_values_(gram_values_.size() - 1) : 0.0;
  return static_cast<double>(n()) * std::numeric_limits<double>::epsilon() * top;
}

int Dataset::gram_rank() const noexcept {
  const double tol = rank_tolerance();
  return static_cast<int>((gram_values_.array() > tol).count());
}

Dataset generate(const ModelParams& params) {
  params.validate();
  const int n = params.n;
  const int k = params.k;

  std::mt19937_64 engine(params.seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd W(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) W(i, j) = normal(engine);
  const double pi_sd = std::sqrt(params.sigma_pi2());
  Eigen::VectorXd pi(k);
  for (int j = 0; j < k; ++j) pi(j) = pi_sd * normal(engine);
  Eigen::VectorXd nu(n);
  for (int i = 0; i < n; ++i) nu(i) = normal(engine);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = normal(engine);

  Eigen::MatrixXd Z;
  if (params.sigma.kind == SigmaKind::isotropic) {
    Z = std::move(W);
  } else {
    // Rows z_i = L w_i, so Cov(z_i) = L L' = Sigma.
    const Eigen::MatrixXd L = sigma_sqrt(params.sigma, k);
    Z = W * L.transpose();
  }
  const Eigen::VectorXd eps = params.rho * nu + std::sqrt(1.0 - params.rho * params.rho) * w;
  Eigen::VectorXd x = Z * pi + nu;
  Eigen::VectorXd y = params.beta * x + eps;
  return Dataset(std::move(y), std::move(x), std::move(Z), params);
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::io, path.string() + ": empty file");
  const auto header = detail::split(line, ',');
  if (header.size() < 3 || detail::trim(header[0]) != "y" || detail::trim(header[1]) != "x")
    fail(ErrorCode::io, path.string() + ": header must be y,x,z1..zk");
  const std::size_t k = header.size() - 2;
  for (std::size_t j = 0; j < k; ++j) {
    if (detail::trim(header[j + 2]) != "z" + std::to_string(j + 1))
      fail(ErrorCode::io, path.string() + ": expected column z" + std::to_string(j + 1));
  }

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != header.size())
      fail(ErrorCode::io, path.string() + ":" + std::to_string(line_no) + ": wrong number of fields");
    for (auto field : fields) {
      const auto text = detail::trim(field);
      double value = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        fail(ErrorCode::io, path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                                std::string(text) + "'");
      values.push_back(value);
    }
    ++rows;
  }
  if (rows < 2) fail(ErrorCode::io, path.string() + ": need at least two data rows");

  const auto n = static_cast<Eigen::Index>(rows);
  const auto cols = static_cast<Eigen::Index>(header.size());
  Eigen::VectorXd y(n), x(n);
  Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* row = values.data() + i * cols;
    y(i) = row[0];
    x(i) = row[1];
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) Z(i, j) = row[j + 2];
  }
  return Dataset(std::move(y), std::move(x), std::move(Z));
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "y,x";
  for (int j = 0; j < data.k(); ++j) out << ",z" << (j + 1);
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    out << detail::format_double(data.y()(i)) << ',' << detail::format_double(data.x()(i));
    for (int j = 0; j < data.k(); ++j) out << ',' << detail::format_double(data.Z()(i, j));
    out << '\n';
  }
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace ivridge::dgp
