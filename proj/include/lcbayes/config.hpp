#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace lcb::config {

enum class Kind { map, mmse, divergence, conjugate, audit };

struct Experiment {
  Kind kind = Kind::audit;
  std::string label;
  std::string model;
  nlohmann::json params = nlohmann::json::object();

  // map
  std::string method = "proximal_gradient";
  double step = 0.0;
  double tol = 1e-10;
  int max_iter = 10000;

  // mmse
  std::string algorithm = "exact";
  double chain_step = 0.0;
  double moreau = 0.1;
  long burn_in = -1;

  // shared
  std::size_t n_samples = 10000;

  // divergence / conjugate
  std::size_t points = 10;
  int quad_order = 30;

  // audit
  std::vector<std::string> checks;      // empty = every applicable check
  std::vector<std::size_t> n_list;      // empty = the model's own dimension
  std::vector<double> eps_list = {0.5};
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::set<std::string> formats = {"csv", "json"};
  int threads = 1;
  std::vector<Experiment> experiments;
  nlohmann::json raw;  // the fully-defaulted config actually executed
};

// Parses and validates a config file; throws lcb::ConfigError with line/field
// diagnostics. All defaults are materialized into the returned RunConfig.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& j, const std::string& origin);

const std::vector<std::string>& known_checks();

}  // namespace lcb::config
