#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lcb {

// Gauss–Legendre rule on [0,1]. Nodes from Newton iteration on P_n;
// results are cached per order.
struct GaussLegendre {
  std::vector<double> nodes;    // in (0,1)
  std::vector<double> weights;  // sum to 1
};

const GaussLegendre& gauss_legendre(int order);

// Adaptive Simpson on a finite interval. Used by the model zoo to fill in
// reference moments (the test suite carries its own, independent integrator).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 60);

}  // namespace lcb
