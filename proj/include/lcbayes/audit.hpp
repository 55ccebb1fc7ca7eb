#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lcbayes/models.hpp"

namespace lcb::audit {

struct AuditReport {
  std::string check;
  std::string model;
  std::size_t n = 0;  // model dimension
  std::size_t N = 0;  // Monte Carlo sample count
  double estimate = 0.0;
  double reference = 0.0;  // reference value (equality) or bound
  double slack = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  bool is_bound = false;
  bool degenerate_flat = false;
  std::string note;
  // vector-valued context (argmin points, coordinate means)
  std::vector<double> estimate_vec;
  std::map<std::string, double> metrics;
};

// argmin_u E[D_phi(u,x)] via the reduced objective phi(u) - u'E[grad phi];
// reports the distance to the MAP point. Smooth unconstrained models only.
AuditReport bayes_argmin_primal(const ModelInstance& model, std::size_t N, std::uint64_t seed);

// argmin_u E[D*_phi(u,x)]; reports the distance to the MC posterior mean.
AuditReport bayes_argmin_dual(const ModelInstance& model, std::size_t N, std::uint64_t seed);

// MC estimate of E[grad phi]; zero for smooth unconstrained models, the
// documented nonzero value for constrained ones.
AuditReport score_identity(const ModelInstance& model, std::size_t N, std::uint64_t seed);

// E[(phi(x) - phi(map))/n] <= 1
AuditReport expected_error_map(const ModelInstance& model, std::size_t N, std::uint64_t seed);

// full chain E[D*(mmse)/n] <= E[D*(map)/n] <= 1 with q = grad phi(mmse)
AuditReport expected_error_mmse(const ModelInstance& model, std::size_t N, std::uint64_t seed);

// D*_phi(map, mmse)/n <= 1
AuditReport duality_closure(const ModelInstance& model, std::size_t N, std::uint64_t seed);

// Constrained models: shifted-MAP estimator argmin_S phi(u) - u'E[grad phi],
// reported alongside the MAP and MMSE points.
AuditReport shifted_map(const ModelInstance& model, std::size_t N, std::uint64_t seed);

// 3 exp(-n eps^2 / 16); eps must lie in (0, 4/sqrt(3)).
double prop4_bound(std::size_t n, double eps);

// Exceedance frequencies of (phi(x)-phi(map))/n >= 1+eps against the bound.
// One report per eps; all thresholds are counted over one shared stream.
std::vector<AuditReport> tail_audit(const ModelInstance& model,
                                    std::span<const double> eps_list, std::size_t N,
                                    std::uint64_t seed);

}  // namespace lcb::audit
