#include "lcbayes/solver.hpp"

#include <cmath>

#include "lcbayes/kernels.hpp"

namespace lcb::solver {
namespace {

std::vector<double> initial_point(const Potential& phi) {
  const std::size_t n = phi.dim();
  std::vector<double> x0(n, 0.0);
  const Domain& d = phi.domain();
  if (d.bounded()) {
    for (std::size_t i = 0; i < n; ++i) x0[i] = 0.5 * (d.lo()[i] + d.hi()[i]);
  } else {
    d.project(std::vector<double>(n, 0.0), x0);
  }
  return x0;
}

void validate(const Potential& phi, const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solver: tolerance must be > 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  const double ls = phi.smooth_lipschitz();
  if (cfg.step > 0.0 && std::isfinite(ls) && ls > 0.0 && cfg.step >= 2.0 / ls)
    throw std::invalid_argument("solver: step must lie in (0, 2/L)");
  switch (cfg.method) {
    case Method::gradient:
      if (phi.has_nonsmooth())
        throw UnsupportedOperation(
            "solver: gradient method needs a smooth unconstrained model; " + phi.name() +
            " has a nonsmooth part");
      break;
    case Method::projected_gradient:
      if (phi.has_nonsmooth() && !phi.nonsmooth_is_indicator())
        throw UnsupportedOperation(
            "solver: projected gradient needs an indicator nonsmooth part; use "
            "proximal_gradient for " +
            phi.name());
      break;
    default:
      break;
  }
}

struct ProxStep {
  double gamma;
  double residual;
};

// One prox-gradient step from x with backtracking; writes the new point into
// xn and returns the step used plus the fixed-point residual at x.
ProxStep prox_gradient_step(const Potential& phi, std::span<const double> x,
                            std::span<double> xn, std::span<double> g,
                            std::span<double> tmp, double gamma, bool backtrack) {
  const std::size_t n = phi.dim();
  phi.smooth_grad(x, g);
  const double fx = phi.smooth_value(x);
  for (;;) {
    // xn = prox_{gamma * nonsmooth}(x - gamma * grad)
    kern::axpy(-gamma, g.data(), x.data(), tmp.data(), n);
    phi.nonsmooth_prox(tmp, gamma, xn);
    if (!backtrack) break;
    // sufficient decrease of the smooth part at the candidate
    kern::sub(xn.data(), x.data(), tmp.data(), n);
    const double quad = kern::dot(g.data(), tmp.data(), n) +
                        kern::reduce_sq(tmp.data(), n) / (2.0 * gamma);
    const double fn = phi.smooth_value(xn);
    if (std::isfinite(fn) && fn <= fx + quad + 1e-12 * (1.0 + std::fabs(fx))) break;
    gamma *= 0.5;
    if (gamma < 1e-18) break;
  }
  kern::sub(x.data(), xn.data(), tmp.data(), n);
  const double res = std::sqrt(kern::reduce_sq(tmp.data(), n)) / gamma;
  return {gamma, res};
}

}  // namespace

SolverResult solve_map(const Potential& phi, const SolverConfig& cfg) {
  validate(phi, cfg);
  const std::size_t n = phi.dim();
  const double ls = phi.smooth_lipschitz();

  double gamma = cfg.step;
  bool backtrack = false;
  if (gamma <= 0.0) {
    if (std::isfinite(ls) && ls > 0.0) {
      gamma = 1.0 / ls;
    } else {
      gamma = 1.0;
      backtrack = true;
    }
  }

  SolverResult out;
  out.unique_minimizer = phi.convexity_modulus() > 0.0;
  out.estimate = initial_point(phi);
  out.trace.reserve(static_cast<std::size_t>(cfg.max_iter));

  std::vector<double> xn(n), g(n), tmp(n), y(n), xprev(n), px(n);
  double t_fista = 1.0;
  y = out.estimate;

  for (int it = 0; it < cfg.max_iter; ++it) {
    out.trace.push_back(phi.value(out.estimate));
    ProxStep st{};
    if (cfg.method == Method::fista) {
      st = prox_gradient_step(phi, y, xn, g, tmp, gamma, backtrack);
      // residual measured at the current iterate, not the extrapolated point
      phi.smooth_grad(out.estimate, g);
      kern::axpy(-st.gamma, g.data(), out.estimate.data(), tmp.data(), n);
      phi.nonsmooth_prox(tmp, st.gamma, px);
      kern::sub(out.estimate.data(), px.data(), tmp.data(), n);
      st.residual = std::sqrt(kern::reduce_sq(tmp.data(), n)) / st.gamma;
    } else {
      st = prox_gradient_step(phi, out.estimate, xn, g, tmp, gamma, backtrack);
    }
    out.residual = st.residual;
    out.iterations = it;
    if (st.residual <= cfg.tol) {
      out.converged = true;
      break;
    }
    if (cfg.method == Method::fista) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_fista * t_fista));
      const double beta = (t_fista - 1.0) / t_next;
      xprev = out.estimate;
      out.estimate = xn;
      kern::sub(out.estimate.data(), xprev.data(), tmp.data(), n);
      kern::axpy(beta, tmp.data(), out.estimate.data(), y.data(), n);
      t_fista = t_next;
    } else {
      out.estimate = xn;
    }
    gamma = st.gamma;
  }
  out.objective = phi.value(out.estimate);
  if (out.converged) out.trace.push_back(out.objective);
  return out;
}

SolverResult solve_map(const ModelInstance& model, const SolverConfig& cfg) {
  return solve_map(*model.potential, cfg);
}

double certify_optimality(const Potential& phi, std::span<const double> xhat, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("certify_optimality: gamma must be > 0");
  const std::size_t n = phi.dim();
  std::vector<double> g(n), tmp(n), px(n);
  phi.smooth_grad(xhat, g);
  kern::axpy(-gamma, g.data(), xhat.data(), tmp.data(), n);
  phi.nonsmooth_prox(tmp, gamma, px);
  kern::sub(xhat.data(), px.data(), tmp.data(), n);
  return std::sqrt(kern::reduce_sq(tmp.data(), n)) / gamma;
}

double certify_optimality(const ModelInstance& model, std::span<const double> xhat,
                          double gamma) {
  return certify_optimality(*model.potential, xhat, gamma);
}

}  // namespace lcb::solver
