#include "ivridge/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "ivridge/error.hpp"

namespace ivridge::config {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) fail(ErrorCode::config, "unknown key '" + item.key() + "' in " + where);
}

const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::config, where + " must be an object");
  return j;
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(ErrorCode::config, where + "." + key + " must be a number");
  return v.get<double>();
}

template <class Int>
Int get_integer(const json& obj, const char* key, Int fallback, const std::string& where, bool required = false) {
  if (!obj.contains(key)) {
    if (required) fail(ErrorCode::config, where + "." + key + " is required");
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(ErrorCode::config, where + "." + key + " must be an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) return v.get<Int>();
    if (v.get<long long>() < 0) fail(ErrorCode::config, where + "." + key + " must be nonnegative");
  }
  return v.get<Int>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(ErrorCode::config, where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(ErrorCode::config, where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(ErrorCode::config, where + "." + key + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

dgp::ModelParams parse_params(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"beta", "rho", "n", "k", "f_stat", "sigma"}, where);
  dgp::ModelParams p;
  p.beta = get_number(j, "beta", p.beta, where);
  p.rho = get_number(j, "rho", p.rho, where);
  p.n = get_integer<int>(j, "n", p.n, where, true);
  p.k = get_integer<int>(j, "k", p.k, where, true);
  p.f_stat = get_number(j, "f_stat", p.f_stat, where);
  p.sigma = dgp::SigmaSpec::parse(get_string(j, "sigma", "isotropic", where));
  return p;
}

montecarlo::ExperimentConfig parse_experiment(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j,
                 {"figure_tag", "replications", "base_seed", "lambda_grid", "methods", "overlay", "cv_grid",
                  "cv_plugin", "params"},
                 where);
  montecarlo::ExperimentConfig c;
  if (!j.contains("params")) fail(ErrorCode::config, where + ".params is required");
  c.params = parse_params(j.at("params"), where + ".params");
  c.figure_tag = get_string(j, "figure_tag", "", where);
  c.replications = get_integer<int>(j, "replications", c.replications, where);
  c.base_seed = get_integer<std::uint64_t>(j, "base_seed", c.base_seed, where);
  if (j.contains("lambda_grid")) c.lambda_grid = get_numbers(j, "lambda_grid", where);
  if (j.contains("cv_grid")) c.cv_grid = get_numbers(j, "cv_grid", where);
  c.overlay = montecarlo::parse_overlay(get_string(j, "overlay", "bias", where));

  const auto plugin = get_string(j, "cv_plugin", "per_lambda", where);
  if (plugin == "per_lambda") {
    c.cv_plugin = estimators::CvPlugin::per_lambda;
  } else if (plugin == "fixed_residual") {
    c.cv_plugin = estimators::CvPlugin::fixed_residual;
  } else {
    fail(ErrorCode::config, where + ".cv_plugin must be per_lambda or fixed_residual");
  }

  if (!j.contains("methods") || !j.at("methods").is_array())
    fail(ErrorCode::config, where + ".methods must be an array of method names");
  for (const auto& m : j.at("methods")) {
    if (!m.is_string()) fail(ErrorCode::config, where + ".methods must be an array of method names");
    c.methods.push_back(montecarlo::parse_mc_method(m.get<std::string>()));
  }

  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::config, where + ": " + e.what());
  }
  return c;
}

}  // namespace

std::vector<montecarlo::ExperimentConfig> parse_experiments(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, json_text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (json_text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << "malformed JSON at line " << line << ", column " << column << ": " << e.what();
    fail(ErrorCode::config, msg.str());
  }

  std::vector<montecarlo::ExperimentConfig> out;
  if (doc.is_array()) {
    if (doc.empty()) fail(ErrorCode::config, "experiment array is empty");
    for (std::size_t i = 0; i < doc.size(); ++i) out.push_back(parse_experiment(doc[i], "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(parse_experiment(doc, "config"));
  }
  return out;
}

std::vector<montecarlo::ExperimentConfig> load_experiments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiments(buf.str());
}

}  // namespace ivridge::config
