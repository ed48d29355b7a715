// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "ivridge/ivridge.h"

namespace {

ivr_dataset* make_dataset(int n, int k, uint64_t seed) {
  ivr_model_params p;
  ivr_model_params_default(&p);
  p.n = n;
  p.k = k;
  p.seed = seed;
  p.sigma = "ar1:0.5";
  ivr_dataset* d = nullptr;
  REQUIRE(ivr_dataset_generate(&p, &d) == IVR_OK);
  return d;
}

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::strcmp(ivr_version(), "0.1.0") == 0);
  CHECK(std::strcmp(ivr_status_string(IVR_OK), "ok") == 0);
  CHECK(std::strlen(ivr_status_string(IVR_ERR_CONFIG)) > 0);
}

TEST_CASE("dataset lifecycle") {
  ivr_dataset* d = make_dataset(40, 20, 5);
  int n = 0, k = 0;
  CHECK(ivr_dataset_dims(d, &n, &k) == IVR_OK);
  CHECK(n == 40);
  CHECK(k == 20);

  const auto path = (std::filesystem::temp_directory_path() / "ivridge_capi.csv").string();
  CHECK(ivr_dataset_write_csv(d, path.c_str()) == IVR_OK);
  ivr_dataset* back = nullptr;
  CHECK(ivr_dataset_read_csv(path.c_str(), &back) == IVR_OK);

  ivr_estimate_result a, b;
  CHECK(ivr_estimate(d, "ba-tsls", 0.5, &a) == IVR_OK);
  CHECK(ivr_estimate(back, "ba_tsls_ridge", 0.5, &b) == IVR_OK);
  CHECK(a.beta_hat == b.beta_hat);
  CHECK(a.has_variance == 1);
  CHECK(a.se_hat == doctest::Approx(std::sqrt(a.variance_hat)));
  ivr_dataset_free(back);
  std::remove(path.c_str());

  CHECK(ivr_dataset_read_csv("/nonexistent/data.csv", &back) == IVR_ERR_IO);
  CHECK(std::strlen(ivr_last_error()) > 0);
  ivr_dataset_free(d);
  ivr_dataset_free(nullptr);
}

TEST_CASE("estimation errors map to status codes") {
  ivr_dataset* wide = make_dataset(30, 45, 2);
  ivr_estimate_result r;
  CHECK(ivr_estimate(wide, "nagar", 0.0, &r) == IVR_ERR_UNSUPPORTED);
  CHECK(std::string(ivr_last_error()).find("gamma >= 1") != std::string::npos);
  CHECK(ivr_estimate(wide, "ba-tsls", 0.0, &r) == IVR_ERR_DEGENERATE);
  CHECK(ivr_estimate(wide, "gmm", 1.0, &r) == IVR_ERR_CONFIG);
  CHECK(ivr_estimate(wide, "tsls", 1.0, nullptr) == IVR_ERR_CONTRACT);
  CHECK(ivr_estimate(wide, "tsls", 1.0, &r) == IVR_OK);
  CHECK(r.has_variance == 0);
  CHECK(std::isnan(r.variance_hat));

  CHECK(ivr_estimate_cv(wide, nullptr, 0, &r) == IVR_OK);
  CHECK(r.lambda >= 1e-3);
  CHECK(r.lambda <= 10.0);
  const double grid[] = {0.1, 1.0};
  CHECK(ivr_estimate_cv(wide, grid, 2, &r) == IVR_OK);
  CHECK((r.lambda == 0.1 || r.lambda == 1.0));
  ivr_dataset_free(wide);
}

TEST_CASE("theory curves") {
  ivr_theory_params p;
  ivr_theory_params_default(&p);
  p.gamma = 0.75;
  const double lambdas[] = {0.0, 0.5};
  double values[2];
  CHECK(ivr_theory_curve("signal_f", "isotropic", &p, lambdas, 2, values) == IVR_OK);
  CHECK(values[0] == doctest::Approx(0.25));
  CHECK(values[1] == doctest::Approx(0.321784).epsilon(1e-6));
  CHECK(ivr_theory_curve("bias", nullptr, &p, lambdas, 2, values) == IVR_OK);
  CHECK(values[1] == doctest::Approx(0.077767).epsilon(1e-5));
  CHECK(ivr_theory_curve("nope", nullptr, &p, lambdas, 2, values) == IVR_ERR_CONFIG);
  const double bad[] = {0.5, 0.0};
  CHECK(ivr_theory_curve("signal_f", nullptr, &p, bad, 2, values) != IVR_OK);
}

TEST_CASE("experiment sets") {
  ivr_experiments* set = nullptr;
  CHECK(ivr_experiments_from_figure("fig9", &set) == IVR_ERR_CONFIG);
  REQUIRE(ivr_experiments_from_figure("fig2", &set) == IVR_OK);
  CHECK(ivr_experiments_size(set) == 2u);
  int reps = 0;
  CHECK(ivr_experiments_replications(set, 0, &reps) == IVR_OK);
  CHECK(reps == 500);
  CHECK(ivr_experiments_replications(set, 5, &reps) == IVR_ERR_CONTRACT);
  char stem[64];
  CHECK(ivr_experiments_describe(set, 0, stem, sizeof stem) == IVR_OK);
  CHECK(std::string(stem) == "fig2_0.75");
  CHECK(ivr_experiments_set_replications(set, 3) == IVR_OK);

  const auto dir = std::filesystem::temp_directory_path() / "ivridge_capi_run";
  std::filesystem::remove_all(dir);
  CHECK(ivr_experiments_run(set, 2, dir.string().c_str()) == IVR_OK);
  CHECK(std::filesystem::exists(dir / "fig2_0.75.csv"));
  CHECK(std::filesystem::exists(dir / "fig2_1.25_replications.csv"));
  std::filesystem::remove_all(dir);
  ivr_experiments_free(set);

  CHECK(ivr_experiments_from_json_file("/nonexistent.json", &set) == IVR_ERR_IO);
}
