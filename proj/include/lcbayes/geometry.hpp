#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lcbayes/linalg.hpp"
#include "lcbayes/potential.hpp"

namespace lcb::geometry {

enum class DivForm { bregman_primal, bregman_dual, generalized_dual, canonical_numeric };

struct DivergenceValue {
  double value = 0.0;
  DivForm form = DivForm::bregman_primal;
  // subgradient actually used (generalized form)
  std::optional<std::vector<double>> subgradient;
  // order-doubling Richardson check (canonical form)
  std::optional<double> refine_residual;
  // generalized form: the supplied q failed the sampled subgradient inequality
  bool subgrad_warning = false;
};

// D_phi(u,x) = phi(u) - phi(x) - grad phi(x)'(u-x)
DivergenceValue bregman(const Potential& phi, std::span<const double> u,
                        std::span<const double> x);

// D*_phi(u,x) = D_phi(x,u)
DivergenceValue dual_bregman(const Potential& phi, std::span<const double> u,
                             std::span<const double> x);

// D*_{phi,q}(s,x) = phi(x) - phi(s) - q'(x-s), q in the subdifferential at s
DivergenceValue generalized_dual(const Potential& phi, std::span<const double> s,
                                 std::span<const double> x, std::span<const double> q);

// Geodesic-quadrature canonical divergence: Gauss-Legendre evaluation of
// int_0^1 t (x-u)' H(u + t(x-u)) (x-u) dt, plus an order-doubling residual.
DivergenceValue canonical_numeric(const Potential& phi, std::span<const double> u,
                                  std::span<const double> x, int quad_order);

struct DualPoint {
  std::vector<double> x;    // maximizer x_eta
  std::vector<double> eta;  // dual coordinates
  double conj_value = 0.0;  // phi*(eta)
};

struct SolveBudget {
  int max_iter = 200;
  double tol = 1e-10;
};

// Numerical Legendre transform: phi*(eta) = max_x x'eta - phi(x).
DualPoint legendre(const Potential& phi, std::span<const double> eta, SolveBudget budget = {});

// Dense Hessian assembled from Hessian-vector products.
Mat metric(const Potential& phi, std::span<const double> x);

// |g*(eta_x) . g(x) - I|_max with g* from central differences of the
// legendre maximizer. fd_step <= 0 selects 1e-4 * (1 + |eta|).
double dual_metric_check(const Potential& phi, std::span<const double> x, double fd_step = 0.0);

// phi**(x) by outer maximization of x'eta - phi*(eta) over eta.
double biconjugate(const Potential& phi, std::span<const double> x, SolveBudget budget = {});

}  // namespace lcb::geometry
