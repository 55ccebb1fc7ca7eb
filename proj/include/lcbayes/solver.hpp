#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lcbayes/models.hpp"

namespace lcb::solver {

enum class Method { gradient, proximal_gradient, fista, projected_gradient };

struct SolverConfig {
  Method method = Method::proximal_gradient;
  // <= 0 selects auto: 1/L of the smooth part, or backtracking when L = inf
  double step = 0.0;
  int max_iter = 10000;
  // stop tolerance on the prox-gradient residual |x - prox(x - g*grad)|/g
  double tol = 1e-10;
  std::uint64_t seed = 0;  // reserved for random restarts; unused by default
};

struct SolverResult {
  std::vector<double> estimate;
  double objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  // false when the model is not strongly convex: the estimate is one limit
  // point of a possibly non-singleton argmin set
  bool unique_minimizer = true;
  std::vector<double> trace;  // objective value per iteration
};

SolverResult solve_map(const ModelInstance& model, const SolverConfig& config);
SolverResult solve_map(const Potential& phi, const SolverConfig& config);

// Prox-gradient fixed-point residual at a candidate point.
double certify_optimality(const ModelInstance& model, std::span<const double> xhat,
                          double gamma);
double certify_optimality(const Potential& phi, std::span<const double> xhat, double gamma);

}  // namespace lcb::solver
