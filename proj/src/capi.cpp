#include "ivridge/ivridge.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "ivridge/config.hpp"
#include "ivridge/dgp.hpp"
#include "ivridge/error.hpp"
#include "ivridge/estimators.hpp"
#include "ivridge/montecarlo.hpp"
#include "ivridge/theory.hpp"

struct ivr_dataset {
  ivridge::dgp::Dataset data;
};

struct ivr_experiments {
  std::vector<ivridge::montecarlo::ExperimentConfig> configs;
};

namespace {

thread_local std::string last_error;

ivr_status status_for(ivridge::ErrorCode code) {
  using ivridge::ErrorCode;
  switch (code) {
    case ErrorCode::domain: return IVR_ERR_DOMAIN;
    case ErrorCode::contract: return IVR_ERR_CONTRACT;
    case ErrorCode::singularity: return IVR_ERR_SINGULARITY;
    case ErrorCode::solver: return IVR_ERR_SOLVER;
    case ErrorCode::degenerate_signal: return IVR_ERR_DEGENERATE;
    case ErrorCode::unsupported: return IVR_ERR_UNSUPPORTED;
    case ErrorCode::config: return IVR_ERR_CONFIG;
    case ErrorCode::io: return IVR_ERR_IO;
  }
  return IVR_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and the thread's last error.
template <class Fn>
ivr_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return IVR_OK;
  } catch (const ivridge::Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return IVR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return IVR_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (!ptr) ivridge::fail(ivridge::ErrorCode::contract, std::string(what) + " must not be NULL");
}

ivridge::dgp::ModelParams to_model(const ivr_model_params& p) {
  ivridge::dgp::ModelParams m;
  m.beta = p.beta;
  m.rho = p.rho;
  m.n = p.n;
  m.k = p.k;
  m.f_stat = p.f_stat;
  m.sigma = ivridge::dgp::SigmaSpec::parse(p.sigma ? p.sigma : "isotropic");
  m.seed = p.seed;
  return m;
}

void fill_result(const ivridge::estimators::EstimateResult& r, ivr_estimate_result* out) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto diag = [&](const char* key) {
    const auto it = r.diagnostics.find(key);
    return it == r.diagnostics.end() ? nan : it->second;
  };
  out->lambda = r.lambda;
  out->beta_hat = r.beta_hat;
  out->has_variance = r.variance_hat.has_value() ? 1 : 0;
  out->variance_hat = r.variance_hat.value_or(nan);
  out->se_hat = r.variance_hat ? std::sqrt(*r.variance_hat) : nan;
  out->signal = r.signal;
  out->v_hat = diag("v_hat");
  out->f_hat_stat = diag("f_hat_stat");
  out->variance_floored = diag("variance_floored") == 1.0 ? 1 : 0;
}

}  // namespace

extern "C" {

const char* ivr_version(void) { return "0.1.0"; }

const char* ivr_status_string(ivr_status status) {
  switch (status) {
    case IVR_OK: return "ok";
    case IVR_ERR_DOMAIN: return "domain";
    case IVR_ERR_CONTRACT: return "contract";
    case IVR_ERR_SINGULARITY: return "singularity";
    case IVR_ERR_SOLVER: return "solver";
    case IVR_ERR_DEGENERATE: return "degenerate_signal";
    case IVR_ERR_UNSUPPORTED: return "unsupported";
    case IVR_ERR_CONFIG: return "config";
    case IVR_ERR_IO: return "io";
    case IVR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ivr_last_error(void) { return last_error.c_str(); }

void ivr_model_params_default(ivr_model_params* params) {
  if (!params) return;
  const ivridge::dgp::ModelParams d;
  params->beta = d.beta;
  params->rho = d.rho;
  params->n = d.n;
  params->k = d.k;
  params->f_stat = d.f_stat;
  params->sigma = "isotropic";
  params->seed = d.seed;
}

void ivr_theory_params_default(ivr_theory_params* params) {
  if (!params) return;
  params->gamma = 0.75;
  params->rho = 0.6;
  params->f_stat = 5.0;
  params->n = 200;
}

ivr_status ivr_dataset_generate(const ivr_model_params* params, ivr_dataset** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = new ivr_dataset{ivridge::dgp::generate(to_model(*params))};
  });
}

ivr_status ivr_dataset_read_csv(const char* path, ivr_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ivr_dataset{ivridge::dgp::read_csv(path)};
  });
}

ivr_status ivr_dataset_write_csv(const ivr_dataset* data, const char* path) {
  return guarded([&] {
    require(data, "data");
    require(path, "path");
    ivridge::dgp::write_csv(data->data, path);
  });
}

ivr_status ivr_dataset_dims(const ivr_dataset* data, int* n, int* k) {
  return guarded([&] {
    require(data, "data");
    if (n) *n = data->data.n();
    if (k) *k = data->data.k();
  });
}

void ivr_dataset_free(ivr_dataset* data) { delete data; }

ivr_status ivr_estimate(const ivr_dataset* data, const char* method, double lambda, ivr_estimate_result* out) {
  return guarded([&] {
    require(data, "data");
    require(method, "method");
    require(out, "out");
    const auto m = ivridge::estimators::parse_method(method);
    fill_result(ivridge::estimators::estimate(data->data, m, lambda), out);
  });
}

ivr_status ivr_estimate_cv(const ivr_dataset* data, const double* grid, size_t count, ivr_estimate_result* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    std::vector<double> lambdas;
    if (grid) {
      lambdas.assign(grid, grid + count);
    } else {
      lambdas = ivridge::estimators::default_cv_grid();
    }
    const auto cv = ivridge::estimators::cv_select(data->data, lambdas);
    fill_result(ivridge::estimators::ba_tsls_ridge(data->data, cv.lambda_star), out);
  });
}

ivr_status ivr_theory_curve(const char* kind, const char* sigma, const ivr_theory_params* params,
                            const double* lambdas, size_t count, double* values) {
  return guarded([&] {
    require(kind, "kind");
    require(params, "params");
    require(lambdas, "lambdas");
    require(values, "values");
    const auto curve_kind = ivridge::theory::parse_curve_kind(kind);
    const auto spec = ivridge::dgp::SigmaSpec::parse(sigma ? sigma : "isotropic");
    ivridge::theory::StructuralParams sp;
    sp.sigma_eps2 = 1.0;
    sp.sigma_nu2 = 1.0;
    sp.sigma_eps_nu = params->rho;
    sp.gamma = params->gamma;
    sp.alpha2 = params->gamma * params->f_stat;
    sp.n = params->n;
    const auto H = ivridge::dgp::population_spectrum(spec);
    const auto curve = ivridge::theory::curve(curve_kind, sp, H, std::span<const double>(lambdas, count));
    std::copy(curve.values.begin(), curve.values.end(), values);
  });
}

ivr_status ivr_experiments_from_figure(const char* tag, ivr_experiments** out) {
  return guarded([&] {
    require(tag, "tag");
    require(out, "out");
    *out = new ivr_experiments{ivridge::montecarlo::figure_configs(tag)};
  });
}

ivr_status ivr_experiments_from_json_file(const char* path, ivr_experiments** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ivr_experiments{ivridge::config::load_experiments(path)};
  });
}

size_t ivr_experiments_size(const ivr_experiments* set) { return set ? set->configs.size() : 0; }

ivr_status ivr_experiments_replications(const ivr_experiments* set, size_t index, int* replications) {
  return guarded([&] {
    require(set, "set");
    require(replications, "replications");
    if (index >= set->configs.size()) ivridge::fail(ivridge::ErrorCode::contract, "experiment index out of range");
    *replications = set->configs[index].replications;
  });
}

ivr_status ivr_experiments_set_replications(ivr_experiments* set, int replications) {
  return guarded([&] {
    require(set, "set");
    if (replications < 1) ivridge::fail(ivridge::ErrorCode::config, "replications must be at least 1");
    for (auto& c : set->configs) c.replications = replications;
  });
}

ivr_status ivr_experiments_describe(const ivr_experiments* set, size_t index, char* buffer, size_t length) {
  return guarded([&] {
    require(set, "set");
    require(buffer, "buffer");
    if (index >= set->configs.size()) ivridge::fail(ivridge::ErrorCode::contract, "experiment index out of range");
    const std::string stem = set->configs[index].file_stem();
    if (stem.size() + 1 > length) ivridge::fail(ivridge::ErrorCode::contract, "buffer too small");
    std::memcpy(buffer, stem.c_str(), stem.size() + 1);
  });
}

ivr_status ivr_experiments_run(const ivr_experiments* set, unsigned workers, const char* out_dir) {
  return guarded([&] {
    require(set, "set");
    require(out_dir, "out_dir");
    const unsigned count = workers > 0 ? workers : ivridge::montecarlo::worker_count_from_env();
    for (const auto& c : set->configs) ivridge::montecarlo::run_and_write(c, count, out_dir);
  });
}

void ivr_experiments_free(ivr_experiments* set) { delete set; }

}  // extern "C"
