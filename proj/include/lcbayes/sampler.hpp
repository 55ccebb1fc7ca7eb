#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "lcbayes/models.hpp"

namespace lcb::sampler {

enum class Algorithm { exact, ula, mala, myula };

struct ChainConfig {
  Algorithm algorithm = Algorithm::exact;
  // <= 0 selects auto: 1/(L+m) for ULA, 1.6 n^{-1/3}/(L+m) for MALA,
  // 1/(L_s + 1/moreau) for MYULA. Auto needs finite L.
  double step = 0.0;
  // Moreau parameter lambda_M (myula only)
  double moreau = 0.1;
  // < 0 selects auto: 10% of n_samples for MCMC, 0 for exact draws
  long burn_in = -1;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
};

struct SampleSet {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> draws;  // count x dim, row-major
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::size_t burn_in_discarded = 0;
  bool iid = false;
  bool low_acceptance_warning = false;

  std::span<const double> row(std::size_t i) const noexcept {
    return {draws.data() + i * dim, dim};
  }
};

SampleSet sample(const ModelInstance& model, const ChainConfig& config);

// Streams the same i.i.d. sequence the exact path of sample() would store,
// without materializing it. Used by the audits at large n*N.
void visit_exact_draws(const ModelInstance& model, std::size_t count, std::uint64_t seed,
                       const std::function<void(std::span<const double>)>& fn);

struct MeanResult {
  std::vector<double> mean;
  std::vector<double> se;
};

// Coordinate-wise mean and Monte Carlo standard error; for correlated chains
// the error is inflated by an integrated-autocorrelation-time estimate.
MeanResult posterior_mean(const SampleSet& samples);

}  // namespace lcb::sampler
