#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "ivridge/montecarlo.hpp"

namespace ivridge::config {

/// Parses one experiment object, or an array of them, from JSON text:
///
///   {"figure_tag": "fig1", "replications": 500, "base_seed": 7,
///    "lambda_grid": [0.1, 0.5], "methods": ["tsls_ridge", "ols"],
///    "overlay": "bias", "cv_grid": [0.01, 0.1, 1], "cv_plugin": "per_lambda",
///    "params": {"beta": 0, "rho": 0.6, "n": 200, "k": 150, "f_stat": 5,
///               "sigma": "ar1:0.5"}}
///
/// Everything except params.n, params.k and methods has a default. Unknown
/// keys, wrong types and invalid values are config errors; syntax errors
/// carry the line and column.
std::vector<montecarlo::ExperimentConfig> parse_experiments(std::string_view json_text);
std::vector<montecarlo::ExperimentConfig> load_experiments(const std::filesystem::path& path);

}  // namespace ivridge::config
