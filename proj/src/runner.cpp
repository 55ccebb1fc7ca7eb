#include "lcbayes/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <mutex>
#include <thread>

#include "lcbayes/geometry.hpp"
#include "lcbayes/io.hpp"
#include "lcbayes/kernels.hpp"
#include "lcbayes/sampler.hpp"
#include "lcbayes/solver.hpp"

namespace lcb::runner {
namespace {

using config::Experiment;
using config::Kind;
using nlohmann::json;

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const int k = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (k == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int t = 0; t < k; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

solver::Method parse_method(const std::string& s) {
  if (s == "gradient") return solver::Method::gradient;
  if (s == "fista") return solver::Method::fista;
  if (s == "projected_gradient") return solver::Method::projected_gradient;
  return solver::Method::proximal_gradient;
}

sampler::Algorithm parse_algorithm(const std::string& s) {
  if (s == "ula") return sampler::Algorithm::ula;
  if (s == "mala") return sampler::Algorithm::mala;
  if (s == "myula") return sampler::Algorithm::myula;
  return sampler::Algorithm::exact;
}

struct ExperimentOutput {
  // file name (relative, no directory) -> contents
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<audit::AuditReport> reports;
  bool numerical_failure = false;
  std::string failure_note;
};

// Deterministic in-domain probe points: the exact sampler when the model has
// one, otherwise seeded normals projected into the domain.
std::vector<std::vector<double>> probe_points(const ModelInstance& model, std::size_t k,
                                              std::uint64_t seed) {
  std::vector<std::vector<double>> pts;
  pts.reserve(k);
  const std::size_t n = model.dim();
  if (model.has_exact_sampler()) {
    sampler::visit_exact_draws(model, k, seed, [&](std::span<const double> x) {
      pts.emplace_back(x.begin(), x.end());
    });
    return pts;
  }
  VariateStream vs(derive_seed(seed, "probe"));
  std::vector<double> x(n), p(n);
  for (std::size_t i = 0; i < k; ++i) {
    for (auto& xi : x) xi = vs.normal();
    model.potential->domain().project(x, p);
    pts.emplace_back(p.begin(), p.end());
  }
  return pts;
}

ExperimentOutput exec_map(const Experiment& e, const config::RunConfig& cfg,
                          std::uint64_t seed) {
  ExperimentOutput out;
  const auto model = make_model(e.model, e.params);
  solver::SolverConfig sc;
  sc.method = parse_method(e.method);
  sc.step = e.step;
  sc.tol = e.tol;
  sc.max_iter = e.max_iter;
  sc.seed = seed;
  const auto res = solver::solve_map(model, sc);
  json j{{"model", e.model},         {"method", e.method},
         {"estimate", res.estimate}, {"objective", res.objective},
         {"residual", res.residual}, {"iterations", res.iterations},
         {"converged", res.converged}};
  out.files.emplace_back(e.label + ".json", j.dump(2) + "\n");
  if (cfg.formats.count("csv")) {
    std::string csv = "model,method,estimate,objective,residual,iterations,converged\n";
    csv += e.model + "," + e.method + "," + io::format_vector(res.estimate) + "," +
           io::format_double(res.objective) + "," + io::format_double(res.residual) + "," +
           std::to_string(res.iterations) + "," + (res.converged ? "true" : "false") + "\n";
    out.files.emplace_back(e.label + ".csv", csv);
  }
  if (!res.converged) {
    out.numerical_failure = true;
    out.failure_note = e.label + ": MAP solve did not converge (residual " +
                       io::format_double(res.residual) + ")";
  }
  return out;
}

ExperimentOutput exec_mmse(const Experiment& e, const config::RunConfig& cfg,
                           std::uint64_t seed) {
  ExperimentOutput out;
  const auto model = make_model(e.model, e.params);
  sampler::ChainConfig sc;
  sc.algorithm = parse_algorithm(e.algorithm);
  sc.step = e.chain_step;
  sc.moreau = e.moreau;
  sc.burn_in = e.burn_in;
  sc.n_samples = e.n_samples;
  sc.seed = seed;
  const auto s = sampler::sample(model, sc);
  const auto pm = sampler::posterior_mean(s);
  json j{{"model", e.model},
         {"algorithm", e.algorithm},
         {"N", s.count},
         {"burn_in", s.burn_in_discarded},
         {"seed", s.seed},
         {"mean", pm.mean},
         {"se", pm.se}};
  if (std::isfinite(s.acceptance_rate)) j["acceptance_rate"] = s.acceptance_rate;
  if (s.low_acceptance_warning) j["low_acceptance_warning"] = true;
  out.files.emplace_back(e.label + ".json", j.dump(2) + "\n");
  if (cfg.formats.count("csv")) {
    std::string csv = "model,algorithm,N,burn_in,seed,mean,se,acceptance_rate\n";
    csv += e.model + "," + e.algorithm + "," + std::to_string(s.count) + "," +
           std::to_string(s.burn_in_discarded) + "," + std::to_string(s.seed) + "," +
           io::format_vector(pm.mean) + "," + io::format_vector(pm.se) + "," +
           (std::isfinite(s.acceptance_rate) ? io::format_double(s.acceptance_rate) : "") +
           "\n";
    out.files.emplace_back(e.label + ".csv", csv);
  }
  return out;
}

ExperimentOutput exec_divergence(const Experiment& e, const config::RunConfig& cfg,
                                 std::uint64_t seed) {
  ExperimentOutput out;
  const auto model = make_model(e.model, e.params);
  const Potential& phi = *model.potential;
  const auto pts = probe_points(model, 2 * e.points, seed);
  std::string csv = "model,form,u,x,value,quad_order,residual\n";
  json rows = json::array();
  auto add = [&](const char* form, std::span<const double> u, std::span<const double> x,
                 double value, int order, std::optional<double> residual) {
    csv += e.model;
    csv += ',';
    csv += form;
    csv += ',';
    csv += io::format_vector(u) + "," + io::format_vector(x) + "," + io::format_double(value) +
           ",";
    if (order > 0) csv += std::to_string(order);
    csv += ',';
    if (residual) csv += io::format_double(*residual);
    csv += '\n';
    json r{{"model", e.model}, {"form", form},   {"u", std::vector<double>(u.begin(), u.end())},
           {"x", std::vector<double>(x.begin(), x.end())}, {"value", value}};
    if (order > 0) r["quad_order"] = order;
    if (residual) r["residual"] = *residual;
    rows.push_back(std::move(r));
  };
  const std::size_t n = phi.dim();
  std::vector<double> q(n);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const auto& u = pts[i];
    const auto& x = pts[i + 1];
    try {
      const auto b = geometry::bregman(phi, u, x);
      add("bregman_primal", u, x, b.value, 0, std::nullopt);
      const auto d = geometry::dual_bregman(phi, u, x);
      add("bregman_dual", u, x, d.value, 0, std::nullopt);
    } catch (const NonSmoothPointError&) {
      // fall through to the generalized form below
    }
    phi.subgrad(x, q);
    const auto g = geometry::generalized_dual(phi, x, u, q);
    add("generalized_dual", x, u, g.value, 0, std::nullopt);
    if (phi.has_hessian() && phi.smoothness() == Smoothness::c3) {
      const auto c = geometry::canonical_numeric(phi, u, x, e.quad_order);
      add("canonical_numeric", u, x, c.value, e.quad_order, c.refine_residual);
    }
  }
  out.files.emplace_back(e.label + ".csv", csv);
  if (cfg.formats.count("json"))
    out.files.emplace_back(e.label + ".json", rows.dump(2) + "\n");
  return out;
}

ExperimentOutput exec_conjugate(const Experiment& e, const config::RunConfig& cfg,
                                std::uint64_t seed) {
  ExperimentOutput out;
  const auto model = make_model(e.model, e.params);
  const Potential& phi = *model.potential;
  if (phi.smoothness() == Smoothness::nonsmooth || !phi.domain().is_all())
    throw UnsupportedOperation("conjugate: needs a smooth unconstrained model, got " +
                               e.model);
  const auto pts = probe_points(model, e.points, seed);
  const std::size_t n = phi.dim();
  std::string csv = "model,eta,x_eta,conjugate,fenchel_residual,grad_residual\n";
  json rows = json::array();
  std::vector<double> eta(n), gcheck(n);
  for (const auto& x : pts) {
    phi.grad(x, eta);
    const auto dp = geometry::legendre(phi, eta);
    // Fenchel-Young residual at the original x: phi(x) + phi*(eta) - x'eta
    const double fy =
        phi.value(x) + dp.conj_value - kern::dot(x.data(), eta.data(), n);
    phi.grad(dp.x, gcheck);
    double gr = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = gcheck[j] - eta[j];
      gr += d * d;
    }
    gr = std::sqrt(gr);
    csv += e.model + "," + io::format_vector(eta) + "," + io::format_vector(dp.x) + "," +
           io::format_double(dp.conj_value) + "," + io::format_double(fy) + "," +
           io::format_double(gr) + "\n";
    rows.push_back(json{{"model", e.model},
                        {"eta", eta},
                        {"x_eta", dp.x},
                        {"conjugate", dp.conj_value},
                        {"fenchel_residual", fy},
                        {"grad_residual", gr}});
  }
  out.files.emplace_back(e.label + ".csv", csv);
  if (cfg.formats.count("json"))
    out.files.emplace_back(e.label + ".json", rows.dump(2) + "\n");
  return out;
}

struct AuditCell {
  std::size_t n;
  std::string check;
};

bool check_applicable(const std::string& check, const ModelInstance& model) {
  const Potential& phi = *model.potential;
  const bool smooth = phi.smoothness() != Smoothness::nonsmooth;
  const bool constrained = !phi.domain().is_all();
  if (!model.has_exact_sampler()) return false;
  if (check == "score") return smooth;
  if (check == "expected_error_map") return true;
  if (check == "expected_error_mmse") return smooth;
  if (check == "argmin_primal") return smooth && !constrained;
  if (check == "argmin_dual") return smooth;
  if (check == "duality_closure") return smooth && !constrained;
  if (check == "shifted_map") return constrained;
  if (check == "tail") return true;
  return false;
}

ExperimentOutput exec_audit(const Experiment& e, const config::RunConfig& cfg,
                            std::uint64_t seed) {
  ExperimentOutput out;
  std::vector<std::size_t> dims = e.n_list;
  if (dims.empty()) dims.push_back(make_model(e.model, e.params).dim());

  std::vector<std::string> checks = e.checks;
  if (checks.empty()) checks = config::known_checks();

  std::vector<AuditCell> cells;
  for (auto n : dims) {
    json params = e.params;
    if (!e.n_list.empty()) params["n"] = n;
    const auto model = make_model(e.model, params);
    for (const auto& c : checks)
      if (check_applicable(c, model)) cells.push_back({n, c});
  }

  std::vector<std::vector<audit::AuditReport>> results(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    const auto& cell = cells[i];
    json params = e.params;
    if (!e.n_list.empty()) params["n"] = cell.n;
    const auto model = make_model(e.model, params);
    const std::uint64_t cell_seed = derive_seed(seed, cell.check, cell.n);
    if (cell.check == "score")
      results[i] = {audit::score_identity(model, e.n_samples, cell_seed)};
    else if (cell.check == "expected_error_map")
      results[i] = {audit::expected_error_map(model, e.n_samples, cell_seed)};
    else if (cell.check == "expected_error_mmse")
      results[i] = {audit::expected_error_mmse(model, e.n_samples, cell_seed)};
    else if (cell.check == "argmin_primal")
      results[i] = {audit::bayes_argmin_primal(model, e.n_samples, cell_seed)};
    else if (cell.check == "argmin_dual")
      results[i] = {audit::bayes_argmin_dual(model, e.n_samples, cell_seed)};
    else if (cell.check == "duality_closure")
      results[i] = {audit::duality_closure(model, e.n_samples, cell_seed)};
    else if (cell.check == "shifted_map")
      results[i] = {audit::shifted_map(model, e.n_samples, cell_seed)};
    else if (cell.check == "tail")
      results[i] = audit::tail_audit(model, e.eps_list, e.n_samples, cell_seed);
  });
  for (auto& r : results)
    for (auto& rep : r) out.reports.push_back(std::move(rep));

  out.files.emplace_back(e.label + ".csv", io::audit_csv(out.reports));
  if (cfg.formats.count("json"))
    out.files.emplace_back(e.label + ".json", io::audit_json(out.reports).dump(2) + "\n");
  return out;
}

}  // namespace

void emit_plot_data(const std::vector<audit::AuditReport>& reports,
                    const std::filesystem::path& path) {
  if (reports.empty()) {
    std::fprintf(stderr, "lcbayes: emit_plot_data: empty report set, nothing written\n");
    return;
  }
  io::write_file_atomic(path, io::plot_csv(reports));
}

RunResult run(const config::RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  std::filesystem::create_directories(cfg.out_dir);

  std::vector<ExperimentOutput> outputs(cfg.experiments.size());
  // experiments run concurrently; all artifacts are merged in index order so
  // the bytes on disk do not depend on the worker count
  parallel_for(cfg.experiments.size(), cfg.threads, [&](std::size_t i) {
    const Experiment& e = cfg.experiments[i];
    const std::uint64_t seed = derive_seed(cfg.seed, "experiment", i);
    switch (e.kind) {
      case Kind::map:
        outputs[i] = exec_map(e, cfg, seed);
        break;
      case Kind::mmse:
        outputs[i] = exec_mmse(e, cfg, seed);
        break;
      case Kind::divergence:
        outputs[i] = exec_divergence(e, cfg, seed);
        break;
      case Kind::conjugate:
        outputs[i] = exec_conjugate(e, cfg, seed);
        break;
      case Kind::audit:
        outputs[i] = exec_audit(e, cfg, seed);
        break;
    }
  });

  std::vector<io::ManifestEntry> manifest;
  bool numerical_failure = false;
  for (auto& o : outputs) {
    for (auto& [name, contents] : o.files) {
      const auto path = cfg.out_dir / name;
      io::write_file_atomic(path, contents);
      manifest.push_back({name, io::sha256_hex(contents), contents.size()});
    }
    if (o.numerical_failure) {
      numerical_failure = true;
      result.failures.push_back(o.failure_note);
    }
    for (auto& rep : o.reports) result.reports.push_back(std::move(rep));
  }

  if (!result.reports.empty()) {
    const auto plot_path = cfg.out_dir / "plot_data.csv";
    const auto contents = io::plot_csv(result.reports);
    io::write_file_atomic(plot_path, contents);
    manifest.push_back({"plot_data.csv", io::sha256_hex(contents), contents.size()});
  }

  for (const auto& rep : result.reports)
    if (!rep.pass)
      result.failures.push_back(rep.check + " on " + rep.model +
                                " (n=" + std::to_string(rep.n) + ")");

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  const std::string config_sha = io::sha256_hex(cfg.raw.dump());
  io::write_file_atomic(cfg.out_dir / "manifest.json",
                        io::manifest_json(config_sha, cfg.seed, wall_ms, manifest).dump(2) +
                            "\n");

  const bool audit_failure =
      std::any_of(result.reports.begin(), result.reports.end(),
                  [](const audit::AuditReport& r) { return !r.pass; });
  result.exit_code = numerical_failure ? 3 : (audit_failure ? 1 : 0);
  return result;
}

}  // namespace lcb::runner
