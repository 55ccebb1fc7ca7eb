#include "lcbayes/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lcbayes/errors.hpp"
#include "lcbayes/models.hpp"

namespace lcb::config {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

std::size_t byte_to_line(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Kind parse_kind(const std::string& origin, const std::string& s) {
  if (s == "map") return Kind::map;
  if (s == "mmse") return Kind::mmse;
  if (s == "divergence") return Kind::divergence;
  if (s == "conjugate") return Kind::conjugate;
  if (s == "audit") return Kind::audit;
  fail(origin, "unknown subcommand '" + s + "' (expected map|mmse|divergence|conjugate|audit)");
}

void validate_model(const std::string& origin, const std::string& name) {
  const auto& names = zoo_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    fail(origin, "unknown model '" + name + "' (did you mean '" + nearest_zoo_name(name) +
                     "'?)");
}

void validate_eps(const std::string& origin, double eps) {
  const double eps_max = 4.0 / std::sqrt(3.0);
  if (!(eps > 0.0) || !(eps < eps_max)) {
    std::ostringstream ss;
    ss << "eps value " << eps << " outside the admissible range (0, 4/sqrt(3) ~ " << eps_max
       << ")";
    fail(origin, ss.str());
  }
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> checks = {
      "score",       "expected_error_map", "expected_error_mmse", "argmin_primal",
      "argmin_dual", "duality_closure",    "shifted_map",         "tail"};
  return checks;
}

RunConfig parse_config(const json& j, const std::string& origin) {
  if (!j.is_object()) fail(origin, "top level must be an object");
  RunConfig cfg;

  if (!j.contains("seed")) fail(origin, "missing required field 'seed' (no implicit entropy)");
  if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
    fail(origin, "field 'seed' must be an integer");
  cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("out")) {
    cfg.out_dir = j.at("out").get<std::string>();
  } else if (const char* env = std::getenv("LCBAYES_OUT")) {
    cfg.out_dir = env;
  } else {
    cfg.out_dir = "lcbayes_out";
  }

  if (j.contains("formats")) {
    cfg.formats.clear();
    for (const auto& f : j.at("formats")) {
      const auto s = f.get<std::string>();
      if (s != "csv" && s != "json") fail(origin, "field 'formats': unknown format '" + s + "'");
      cfg.formats.insert(s);
    }
    if (cfg.formats.empty()) fail(origin, "field 'formats' must not be empty");
  }

  cfg.threads = j.value("threads", 1);
  if (cfg.threads < 1 || cfg.threads > 256) fail(origin, "field 'threads' out of range [1,256]");

  if (!j.contains("experiments") || !j.at("experiments").is_array() ||
      j.at("experiments").empty())
    fail(origin, "missing or empty 'experiments' array");

  static const std::set<std::string> known_exp_keys = {
      "subcommand", "label", "model", "params",    "method",   "step",   "tol",
      "max_iter",   "algorithm",      "chain_step", "moreau",  "burn_in", "N",
      "points",     "quad_order",     "checks",     "n_list",  "eps_list"};

  std::size_t idx = 0;
  for (const auto& je : j.at("experiments")) {
    const std::string eorigin = origin + ": experiments[" + std::to_string(idx) + "]";
    if (!je.is_object()) fail(eorigin, "must be an object");
    for (const auto& [key, _] : je.items())
      if (!known_exp_keys.count(key)) fail(eorigin, "unknown field '" + key + "'");

    Experiment e;
    if (!je.contains("subcommand")) fail(eorigin, "missing required field 'subcommand'");
    e.kind = parse_kind(eorigin, je.at("subcommand").get<std::string>());
    if (!je.contains("model")) fail(eorigin, "missing required field 'model'");
    e.model = je.at("model").get<std::string>();
    validate_model(eorigin, e.model);
    e.params = je.value("params", json::object());
    e.label = je.value("label", je.at("subcommand").get<std::string>() + "_" +
                                    std::to_string(idx));
    e.method = je.value("method", "proximal_gradient");
    if (e.method != "gradient" && e.method != "proximal_gradient" && e.method != "fista" &&
        e.method != "projected_gradient")
      fail(eorigin, "unknown method '" + e.method + "'");
    e.step = je.value("step", 0.0);
    e.tol = je.value("tol", 1e-10);
    if (!(e.tol > 0.0)) fail(eorigin, "'tol' must be > 0");
    e.max_iter = je.value("max_iter", 10000);
    e.algorithm = je.value("algorithm", "exact");
    if (e.algorithm != "exact" && e.algorithm != "ula" && e.algorithm != "mala" &&
        e.algorithm != "myula")
      fail(eorigin, "unknown algorithm '" + e.algorithm + "'");
    e.chain_step = je.value("chain_step", 0.0);
    e.moreau = je.value("moreau", 0.1);
    if (!(e.moreau > 0.0)) fail(eorigin, "'moreau' must be > 0");
    e.burn_in = je.value("burn_in", -1L);
    e.n_samples = je.value("N", std::size_t{10000});
    if (e.n_samples < 2) fail(eorigin, "'N' must be >= 2");
    e.points = je.value("points", std::size_t{10});
    e.quad_order = je.value("quad_order", 30);
    if (e.quad_order < 1 || e.quad_order > 256) fail(eorigin, "'quad_order' out of range");
    if (je.contains("checks")) {
      for (const auto& c : je.at("checks")) {
        const auto s = c.get<std::string>();
        const auto& kc = known_checks();
        if (std::find(kc.begin(), kc.end(), s) == kc.end())
          fail(eorigin, "unknown audit check '" + s + "'");
        e.checks.push_back(s);
      }
    }
    if (je.contains("n_list"))
      e.n_list = je.at("n_list").get<std::vector<std::size_t>>();
    for (auto nv : e.n_list)
      if (nv < 1) fail(eorigin, "'n_list' entries must be >= 1");
    if (je.contains("eps_list")) {
      e.eps_list = je.at("eps_list").get<std::vector<double>>();
      if (e.eps_list.empty()) fail(eorigin, "'eps_list' must not be empty");
    }
    for (double eps : e.eps_list) validate_eps(eorigin, eps);
    cfg.experiments.push_back(std::move(e));
    ++idx;
  }

  // materialize the fully-defaulted config for the manifest
  json raw = json::object();
  raw["seed"] = cfg.seed;
  raw["out"] = cfg.out_dir.string();
  raw["formats"] = cfg.formats;
  raw["threads"] = cfg.threads;
  raw["experiments"] = json::array();
  for (const auto& e : cfg.experiments) {
    json je{{"subcommand",
             e.kind == Kind::map         ? "map"
             : e.kind == Kind::mmse      ? "mmse"
             : e.kind == Kind::divergence ? "divergence"
             : e.kind == Kind::conjugate  ? "conjugate"
                                          : "audit"},
            {"label", e.label},
            {"model", e.model},
            {"params", e.params},
            {"method", e.method},
            {"step", e.step},
            {"tol", e.tol},
            {"max_iter", e.max_iter},
            {"algorithm", e.algorithm},
            {"chain_step", e.chain_step},
            {"moreau", e.moreau},
            {"burn_in", e.burn_in},
            {"N", e.n_samples},
            {"points", e.points},
            {"quad_order", e.quad_order},
            {"checks", e.checks},
            {"n_list", e.n_list},
            {"eps_list", e.eps_list}};
    raw["experiments"].push_back(std::move(je));
  }
  cfg.raw = std::move(raw);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(byte_to_line(text, e.byte)) +
                      ": " + e.what());
  }
  return parse_config(j, path.string());
}

}  // namespace lcb::config
