#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ivridge/dgp.hpp"
#include "ivridge/error.hpp"

using namespace ivridge;
using namespace ivridge::dgp;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ivridge_test_" + name);
}

}  // namespace

TEST_CASE("sigma spec parsing") {
  CHECK(SigmaSpec::parse("isotropic").kind == SigmaKind::isotropic);
  const auto ar = SigmaSpec::parse("ar1:0.5");
  CHECK(ar.kind == SigmaKind::ar1);
  CHECK(ar.rho_z == 0.5);
  CHECK(ar.label() == "ar1:0.5");
  CHECK(SigmaSpec::parse("equicorrelated:0.3").rho_z == 0.3);
  for (const char* bad : {"ar1", "ar1:x", "ar1:1.5", "isotropic:0.2", "banded:0.1", "ar1:0.5z"}) {
    try {
      SigmaSpec::parse(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config);
    }
  }
}

TEST_CASE("sigma square root") {
  for (const char* text : {"ar1:0.5", "equicorrelated:0.3", "isotropic"}) {
    const auto spec = SigmaSpec::parse(text);
    const Eigen::MatrixXd S = sigma_matrix(spec, 12);
    const Eigen::MatrixXd L = sigma_sqrt(spec, 12);
    CHECK((L * L.transpose() - S).norm() <= 1e-12);
    CHECK(S.diagonal().sum() == doctest::Approx(12.0));
  }
  CHECK(population_spectrum(SigmaSpec::parse("ar1:0.5"), 200).mean() == doctest::Approx(1.0));
}

TEST_CASE("model parameters") {
  ModelParams p;
  p.n = 200;
  p.k = 150;
  p.f_stat = 5.0;
  CHECK(p.gamma() == doctest::Approx(0.75));
  CHECK(p.alpha2() == doctest::Approx(3.75));
  CHECK(p.sigma_pi2() == doctest::Approx(0.025));
  const auto c = concentration(p);
  CHECK(c.mu2 == doctest::Approx(750.0));
  CHECK(c.f == doctest::Approx(5.0));
  p.rho = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.rho = 0.6;
  p.f_stat = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("seed streams") {
  // SplitMix64 started from state 0 produces 0xE220A8397B1DCDAF first.
  CHECK(stream_seed(0, 0) == 0xE220A8397B1DCDAFULL);
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 5) == stream_seed(1, 5));
}

TEST_CASE("generation is reproducible") {
  ModelParams p;
  p.n = 40;
  p.k = 20;
  p.seed = 9;
  p.sigma = SigmaSpec::parse("ar1:0.5");
  const auto a = generate(p);
  const auto b = generate(p);
  CHECK(a.y() == b.y());
  CHECK(a.Z() == b.Z());
  p.seed = 10;
  CHECK(generate(p).y() != a.y());
}

TEST_CASE("simulated errors have the design correlation") {
  // Pool 60 small samples: with beta = 0 the outcome is eps, and
  // cov(x, eps) = cov(nu, eps) = rho.
  ModelParams p;
  p.n = 200;
  p.k = 5;
  p.rho = 0.6;
  p.beta = 0.0;
  double xy = 0.0, yy = 0.0;
  int count = 0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    p.seed = stream_seed(123, s);
    const auto d = generate(p);
    xy += d.x().dot(d.y());
    yy += d.y().squaredNorm();
    count += d.n();
  }
  CHECK(yy / count == doctest::Approx(1.0).epsilon(0.05));
  CHECK(xy / count == doctest::Approx(0.6).epsilon(0.05));
}

TEST_CASE("dataset caches the gram eigendecomposition") {
  for (int k : {10, 50}) {
    ModelParams p;
    p.n = 30;
    p.k = k;
    p.seed = 3;
    const auto d = generate(p);
    const Eigen::MatrixXd G = d.Z() * d.Z().transpose() / 30.0;
    const Eigen::MatrixXd rebuilt = d.gram_vectors() * d.gram_values().asDiagonal() * d.gram_vectors().transpose();
    CHECK((rebuilt - G).norm() <= 1e-10 * G.norm());
    CHECK(d.gram_rank() == std::min(30, k));
    CHECK((d.x_rotated() - d.gram_vectors().transpose() * d.x()).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(Dataset(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(3, 2)), Error);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
  bad(1) = std::nan("");
  CHECK_THROWS_AS(Dataset(bad, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Ones(3, 2)), Error);
}

TEST_CASE("csv round trip") {
  ModelParams p;
  p.n = 25;
  p.k = 7;
  p.seed = 77;
  const auto d = generate(p);
  const auto path = temp_file("roundtrip.csv");
  write_csv(d, path);
  const auto back = read_csv(path);
  CHECK(back.y() == d.y());
  CHECK(back.x() == d.x());
  CHECK(back.Z() == d.Z());
  std::filesystem::remove(path);
}

TEST_CASE("csv errors") {
  const auto path = temp_file("bad.csv");
  auto write = [&](const char* text) {
    std::ofstream(path) << text;
  };
  auto code_of = [&] {
    try {
      read_csv(path);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::contract;
  };
  write("a,b,c\n1,2,3\n4,5,6\n");
  CHECK(code_of() == ErrorCode::io);
  write("y,x,z1\n1,2,3\n4,oops,6\n");
  try {
    read_csv(path);
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  write("y,x,z1\n1,2\n3,4,5\n");
  CHECK(code_of() == ErrorCode::io);
  std::filesystem::remove(path);
  CHECK(code_of() == ErrorCode::io);
}
