#include <doctest.h>

#include <cmath>
#include <vector>

#include "ivridge/error.hpp"
#include "ivridge/spectral.hpp"
#include "ivridge/theory.hpp"

using namespace ivridge;
using namespace ivridge::theory;

namespace {

StructuralParams design(double gamma, double f_stat = 5.0, double rho = 0.6) {
  StructuralParams p;
  p.sigma_eps2 = 1.0;
  p.sigma_nu2 = 1.0;
  p.sigma_eps_nu = rho;
  p.gamma = gamma;
  p.alpha2 = gamma * f_stat;
  p.n = 200;
  return p;
}

const spectral::SpectralMeasure& iso() {
  static const auto h = spectral::psd_point_mass(1.0);
  return h;
}

}  // namespace

TEST_CASE("structural parameter validation") {
  auto p = design(0.75);
  CHECK(p.f_stat() == doctest::Approx(5.0));
  CHECK(p.mu2() == doctest::Approx(750.0));
  p.sigma_eps_nu = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = design(0.75);
  p.alpha2 = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("curve kind names") {
  CHECK(parse_curve_kind("bias") == CurveKind::bias_tsls_ridge);
  CHECK(parse_curve_kind("signal_f") == CurveKind::signal_f);
  CHECK(parse_curve_kind("variance") == CurveKind::asy_variance);
  CHECK(to_string(CurveKind::amplifier_a) == "amplifier_a");
  try {
    parse_curve_kind("nope");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
  }
}

TEST_CASE("isotropic reference point gamma = 0.75, lambda = 0.5") {
  const auto tv = spectral::solve_silverstein(iso(), 0.75, 0.5);
  const auto p = design(0.75);
  CHECK(amplifier_a(tv) == doctest::Approx(1.343071).epsilon(1e-6));
  CHECK(signal_f(tv) == doctest::Approx(0.321784).epsilon(1e-6));
  CHECK(bias_tsls_ridge_limit(p, tv) == doctest::Approx(0.077767).epsilon(1e-5));

  // Hand evaluation of the bias formula from the transforms.
  const double lv = tv.lambda_v;
  const double lp = 0.5 * tv.p();
  CHECK(bias_tsls_ridge_limit(p, tv) == doctest::Approx(0.6 * (1 - lv) / (3.75 * (1 - lp) + (1 - lv))));
}

TEST_CASE("ols bias") {
  CHECK(bias_ols(design(0.75)) == doctest::Approx(0.126316).epsilon(1e-5));
  CHECK(bias_ols(design(1.25)) == doctest::Approx(0.082759).epsilon(1e-5));
}

TEST_CASE("ridgeless limits of the curves") {
  const auto p_low = design(0.75);
  const auto p_high = design(1.25);
  const auto t_low = spectral::population_transforms(iso(), 0.75, 0.0);
  const auto t_high = spectral::population_transforms(iso(), 1.25, 0.0);
  // Below the threshold the ridgeless 2SLS bias is sigma_ev gamma / (alpha^2 + gamma sigma_v^2).
  CHECK(bias_tsls_ridge_limit(p_low, t_low) == doctest::Approx(0.6 * 0.75 / (3.75 + 0.75)));
  // Above it the first stage interpolates and 2SLS collapses to OLS.
  CHECK(bias_tsls_ridge_limit(p_high, t_high) == doctest::Approx(bias_ols(p_high)));
  CHECK(signal_f(t_low) == doctest::Approx(0.25));
  CHECK(signal_f(t_high) == doctest::Approx(0.0));
  CHECK(amplifier_a(t_low) == doctest::Approx(1.0));
}

TEST_CASE("bekker closed form") {
  const auto p = design(0.75);
  CHECK(bekker_asy_variance(p) == doctest::Approx(0.0027840).epsilon(1e-4));
  const double by_hand = (1.0 / 3.75 + 3.0 * (1.0 + 0.36) / (3.75 * 3.75)) / 200.0;
  CHECK(bekker_asy_variance(p) == doctest::Approx(by_hand).epsilon(1e-14));
  CHECK_THROWS_AS(bekker_asy_variance(design(1.25)), Error);

  auto uncorrelated = p;
  uncorrelated.sigma_eps_nu = 0.0;
  CHECK(bekker_asy_variance(uncorrelated) == doctest::Approx(0.0024).epsilon(1e-10));
}

TEST_CASE("ridge variance tends to the bekker form as lambda -> 0") {
  const auto p = design(0.75);
  for (const auto& h : {spectral::psd_point_mass(1.0), spectral::psd_ar1(0.5, 400)}) {
    const double v = asy_variance_ba_ridge(p, spectral::solve_silverstein(h, 0.75, 1e-8));
    CHECK(std::abs(v / bekker_asy_variance(p) - 1.0) <= 1e-4);
    const double v0 = asy_variance_ba_ridge(p, spectral::population_transforms(h, 0.75, 0.0));
    CHECK(v0 == doctest::Approx(bekker_asy_variance(p)).epsilon(1e-9));
  }
  // Zero signal at the ridgeless point above the threshold.
  try {
    asy_variance_ba_ridge(design(1.25), spectral::population_transforms(iso(), 1.25, 0.0));
    FAIL("expected a degenerate signal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_signal);
  }
}

TEST_CASE("signal slope near zero follows the gamma > 1/2 condition") {
  // d f / d lambda at 0+ equals gamma E[1/Y] - 1 = gamma / (1 - gamma) - 1 for identity covariance.
  for (double gamma : {0.4, 0.6, 0.75}) {
    const double h = 1e-6;
    const double slope =
        (signal_f(spectral::solve_silverstein(iso(), gamma, 2 * h)) - signal_f(spectral::solve_silverstein(iso(), gamma, h))) / h;
    CHECK(slope == doctest::Approx(gamma / (1.0 - gamma) - 1.0).epsilon(1e-3).scale(1.0));
  }
  CHECK(esd_inverse_moment(iso(), 0.5) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("curve over a grid") {
  const auto p = design(0.75);
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto c = curve(CurveKind::signal_f, p, iso(), grid);
  REQUIRE(c.values.size() == 3);
  CHECK(c.values[0] == doctest::Approx(0.25));
  CHECK(c.values[1] == doctest::Approx(0.321784).epsilon(1e-6));
  CHECK(c.values[1] == doctest::Approx(evaluate(CurveKind::signal_f, p, spectral::solve_silverstein(iso(), 0.75, 0.5))));

  const std::vector<double> unsorted{1.0, 0.5};
  CHECK_THROWS_AS(curve(CurveKind::signal_f, p, iso(), unsorted), Error);
  const std::vector<double> negative{-1.0};
  CHECK_THROWS_AS(curve(CurveKind::signal_f, p, iso(), negative), Error);
  const std::vector<double> empty;
  CHECK_THROWS_AS(curve(CurveKind::signal_f, p, iso(), empty), Error);
}
