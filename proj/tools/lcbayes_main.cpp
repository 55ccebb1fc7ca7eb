#include <CLI11.hpp>

#include <cstdio>

#include "lcbayes/errors.hpp"
#include "lcbayes/io.hpp"
#include "lcbayes/runner.hpp"

namespace {

using nlohmann::json;

json parse_params(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw lcb::ConfigError(std::string("--params: ") + e.what());
  }
}

int execute(const lcb::config::RunConfig& cfg) {
  const auto result = lcb::runner::run(cfg);
  for (const auto& r : result.reports)
    std::printf("[%s] %-24s %-22s n=%-6zu estimate=%-14.8g %s=%-14.8g slack=%.3g\n",
                r.pass ? "PASS" : "FAIL", r.check.c_str(), r.model.c_str(), r.n, r.estimate,
                r.is_bound ? "bound" : "reference", r.reference, r.slack);
  if (!result.failures.empty()) {
    std::fprintf(stderr, "failures:\n");
    for (const auto& f : result.failures) std::fprintf(stderr, "  %s\n", f.c_str());
  }
  std::printf("artifacts written to %s\n", cfg.out_dir.string().c_str());
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lcbayes: MAP/MMSE estimation and decision-theoretic audits for "
               "log-concave models"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir;
  std::vector<std::string> formats;
  int threads = 1;
  app.add_option("--seed", seed, "master seed (all randomness derives from it)");
  app.add_option("--out", out_dir, "output directory (default: $LCBAYES_OUT or ./lcbayes_out)");
  app.add_option("--format", formats, "output formats: csv, json (default both)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker threads for independent experiments")
      ->check(CLI::Range(1, 256));

  std::string config_path;
  auto* cmd_run = app.add_subcommand("run", "execute a batch config file");
  cmd_run->add_option("config", config_path, "path to the JSON config")->required();

  std::string model = "gaussian";
  std::string params_text = "{}";
  std::string method = "proximal_gradient";
  std::string algorithm = "exact";
  double step = 0.0, tol = 1e-10, moreau = 0.1, chain_step = 0.0;
  int max_iter = 10000, quad_order = 30;
  long burn_in = -1;
  std::size_t n_samples = 10000, points = 10;
  std::vector<std::size_t> n_list;
  std::vector<double> eps_list;
  std::vector<std::string> checks;

  auto add_model_opts = [&](CLI::App* cmd) {
    cmd->add_option("--model", model, "zoo model name")->required();
    cmd->add_option("--params", params_text, "model parameters as inline JSON");
  };

  auto* cmd_map = app.add_subcommand("map", "MAP point by convex optimization");
  add_model_opts(cmd_map);
  cmd_map->add_option("--method", method)
      ->check(CLI::IsMember({"gradient", "proximal_gradient", "fista", "projected_gradient"}));
  cmd_map->add_option("--step", step);
  cmd_map->add_option("--tol", tol);
  cmd_map->add_option("--max-iter", max_iter);

  auto* cmd_mmse = app.add_subcommand("mmse", "posterior mean by sampling");
  add_model_opts(cmd_mmse);
  cmd_mmse->add_option("--algorithm", algorithm)
      ->check(CLI::IsMember({"exact", "ula", "mala", "myula"}));
  cmd_mmse->add_option("-N,--samples", n_samples);
  cmd_mmse->add_option("--step", chain_step);
  cmd_mmse->add_option("--moreau", moreau);
  cmd_mmse->add_option("--burn-in", burn_in);

  auto* cmd_div = app.add_subcommand("divergence", "divergence table on sampled pairs");
  add_model_opts(cmd_div);
  cmd_div->add_option("--pairs", points);
  cmd_div->add_option("--quad-order", quad_order);

  auto* cmd_conj = app.add_subcommand("conjugate", "numerical Legendre transform table");
  add_model_opts(cmd_conj);
  cmd_conj->add_option("--points", points);

  auto* cmd_audit = app.add_subcommand("audit", "decision-theoretic audits");
  add_model_opts(cmd_audit);
  cmd_audit->add_option("--checks", checks)->check(CLI::IsMember(lcb::config::known_checks()));
  cmd_audit->add_option("-N,--samples", n_samples);
  cmd_audit->add_option("--n-list", n_list);
  cmd_audit->add_option("--eps-list", eps_list);

  CLI11_PARSE(app, argc, argv);

  try {
    lcb::config::RunConfig cfg;
    if (cmd_run->parsed()) {
      cfg = lcb::config::load_config(config_path);
      if (app.count("--seed")) cfg.seed = seed;
      if (app.count("--out")) cfg.out_dir = out_dir;
      if (app.count("--threads")) cfg.threads = threads;
      if (app.count("--format")) {
        cfg.formats.clear();
        cfg.formats.insert(formats.begin(), formats.end());
      }
    } else {
      json e;
      e["model"] = model;
      e["params"] = parse_params(params_text);
      if (cmd_map->parsed()) {
        e["subcommand"] = "map";
        e["method"] = method;
        e["step"] = step;
        e["tol"] = tol;
        e["max_iter"] = max_iter;
      } else if (cmd_mmse->parsed()) {
        e["subcommand"] = "mmse";
        e["algorithm"] = algorithm;
        e["N"] = n_samples;
        e["chain_step"] = chain_step;
        e["moreau"] = moreau;
        e["burn_in"] = burn_in;
      } else if (cmd_div->parsed()) {
        e["subcommand"] = "divergence";
        e["points"] = points;
        e["quad_order"] = quad_order;
      } else if (cmd_conj->parsed()) {
        e["subcommand"] = "conjugate";
        e["points"] = points;
      } else {
        e["subcommand"] = "audit";
        e["N"] = n_samples;
        if (!checks.empty()) e["checks"] = checks;
        if (!n_list.empty()) e["n_list"] = n_list;
        if (!eps_list.empty()) e["eps_list"] = eps_list;
      }
      json root{{"seed", seed}, {"experiments", json::array({e})}, {"threads", threads}};
      if (!out_dir.empty()) root["out"] = out_dir;
      if (!formats.empty()) root["formats"] = formats;
      cfg = lcb::config::parse_config(root, "<cli>");
    }
    return execute(cfg);
  } catch (const lcb::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const lcb::UnsupportedOperation& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const lcb::ConvergenceError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
