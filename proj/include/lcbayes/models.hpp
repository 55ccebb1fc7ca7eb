#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcbayes/potential.hpp"
#include "lcbayes/rng.hpp"

namespace lcb {

// Draws one i.i.d. sample from the posterior exp(-phi(x))/Z.
class ExactSampler {
 public:
  virtual ~ExactSampler() = default;
  virtual void draw(VariateStream& vs, std::span<double> out) const = 0;
};

// Closed-form / quadrature reference quantities for oracle tests and audits.
struct References {
  std::optional<std::vector<double>> map_point;
  std::optional<std::vector<double>> mean;
  // E[phi(x)] - phi(map_point)
  std::optional<double> phi_gap;
  // E[grad of the smooth part]; zero for smooth unconstrained models
  std::optional<std::vector<double>> score;
  // argmin over the domain of phi(u) - u' * score
  std::optional<std::vector<double>> shifted_map;
};

struct ModelInstance {
  std::string name;
  std::shared_ptr<const Potential> potential;
  std::shared_ptr<const ExactSampler> sampler;  // null => requires MCMC
  References refs;

  bool has_exact_sampler() const noexcept { return sampler != nullptr; }
  std::size_t dim() const noexcept { return potential->dim(); }
};

const std::vector<std::string>& zoo_names();
// Closest zoo name by edit distance (for config diagnostics).
std::string nearest_zoo_name(const std::string& name);

// Builds a zoo model. params is a JSON object; every model accepts defaults.
//   gaussian:               {n, mu:[...], cov:[...] or scalar}
//   gaussian_linear:        {A:[[...]], y:[...], sigma}
//   laplace_iid:            {n}
//   lasso_1d:               {y, lambda}
//   quartic:                {n}
//   exp_linear:             {n}
//   exponential_cone:       {n}
//   truncated_gaussian_box: {n, mu:[...], lo:[...], hi:[...]}
//   exp_cone:               {n}
ModelInstance make_model(const std::string& name, const nlohmann::json& params);
ModelInstance make_model(const std::string& name);

// base potential with the smooth part tilted by -shift'u. prox/domain/
// curvature carry over; prox of the tilted potential is prox_phi(u+gamma*shift).
std::shared_ptr<const Potential> tilt_potential(std::shared_ptr<const Potential> base,
                                                std::vector<double> shift);

}  // namespace lcb
