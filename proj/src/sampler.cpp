#include "lcbayes/sampler.hpp"

#include <cmath>

#include "lcbayes/kernels.hpp"

namespace lcb::sampler {
namespace {

std::vector<double> chain_start(const Potential& phi) {
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

double auto_step(const ModelInstance& model, const ChainConfig& cfg) {
  const Potential& phi = *model.potential;
  if (cfg.algorithm == Algorithm::myula) {
    const double ls = phi.smooth_lipschitz();
    const double env = 1.0 / cfg.moreau;
    if (!std::isfinite(ls))
      throw std::invalid_argument("sampler: auto step needs a finite smooth Lipschitz "
                                  "constant; pass an explicit step for " + phi.name());
    return 1.0 / (ls + env);
  }
  const double l = phi.grad_lipschitz();
  const double m = phi.convexity_modulus();
  if (!std::isfinite(l))
    throw std::invalid_argument("sampler: auto step needs finite L; pass an explicit "
                                "step for " + phi.name());
  if (cfg.algorithm == Algorithm::mala) {
    // dimension-aware scaling keeps the acceptance rate in a useful band
    const double n = static_cast<double>(phi.dim());
    return 1.6 * std::pow(n, -1.0 / 3.0) / (l + m);
  }
  return 1.0 / (l + m);
}

}  // namespace

void visit_exact_draws(const ModelInstance& model, std::size_t count, std::uint64_t seed,
                       const std::function<void(std::span<const double>)>& fn) {
  if (!model.has_exact_sampler())
    throw UnsupportedOperation("sampler: " + model.name + " has no exact sampler recipe");
  VariateStream vs(derive_seed(seed, "exact"));
  std::vector<double> x(model.dim());
  for (std::size_t i = 0; i < count; ++i) {
    model.sampler->draw(vs, x);
    fn(x);
  }
}

SampleSet sample(const ModelInstance& model, const ChainConfig& cfg) {
  const Potential& phi = *model.potential;
  const std::size_t n = phi.dim();
  if (cfg.n_samples < 1) throw std::invalid_argument("sampler: n_samples must be >= 1");
  if (cfg.algorithm == Algorithm::myula && !(cfg.moreau > 0.0))
    throw std::invalid_argument("sampler: myula needs moreau > 0");

  SampleSet out;
  out.count = cfg.n_samples;
  out.dim = n;
  out.seed = cfg.seed;
  out.draws.resize(cfg.n_samples * n);

  if (cfg.algorithm == Algorithm::exact) {
    out.iid = true;
    out.burn_in_discarded = cfg.burn_in > 0 ? static_cast<std::size_t>(cfg.burn_in) : 0;
    std::size_t i = 0;
    std::size_t skip = out.burn_in_discarded;
    visit_exact_draws(model, cfg.n_samples + skip, cfg.seed,
                      [&](std::span<const double> x) {
                        if (skip > 0) {
                          --skip;
                          return;
                        }
                        std::copy(x.begin(), x.end(), out.draws.begin() + i * n);
                        ++i;
                      });
    return out;
  }

  // Langevin chains
  const bool constrained = !phi.domain().is_all();
  if ((cfg.algorithm == Algorithm::ula || cfg.algorithm == Algorithm::mala)) {
    if (phi.smoothness() == Smoothness::nonsmooth)
      throw UnsupportedOperation("sampler: " + model.name +
                                 " is non-smooth; use myula (Moreau-smoothed)");
    if (constrained)
      throw UnsupportedOperation("sampler: " + model.name +
                                 " is constrained; use myula (Moreau-smoothed)");
  }

  const double delta = cfg.step > 0.0 ? cfg.step : auto_step(model, cfg);
  const double noise = std::sqrt(2.0 * delta);
  const std::size_t burn =
      cfg.burn_in >= 0 ? static_cast<std::size_t>(cfg.burn_in) : cfg.n_samples / 10;

  VariateStream vs(derive_seed(cfg.seed, "chain"));
  std::vector<double> x = chain_start(phi);
  std::vector<double> g(n), prop(n), gp(n), tmp(n), penv(n);

  std::size_t accepted = 0, proposals = 0;
  double fx = 0.0;
  if (cfg.algorithm == Algorithm::mala) {
    phi.grad(x, g);
    fx = phi.value(x);
  }

  const std::size_t total = cfg.n_samples + burn;
  for (std::size_t k = 0; k < total; ++k) {
    switch (cfg.algorithm) {
      case Algorithm::ula: {
        phi.grad(x, g);
        for (std::size_t i = 0; i < n; ++i) x[i] += -delta * g[i] + noise * vs.normal();
        break;
      }
      case Algorithm::myula: {
        // drift = grad of smooth part + gradient of the Moreau envelope of
        // the nonsmooth part: (x - prox_{lambda}(x)) / lambda
        phi.smooth_grad(x, g);
        phi.nonsmooth_prox(x, cfg.moreau, penv);
        for (std::size_t i = 0; i < n; ++i) {
          const double drift = g[i] + (x[i] - penv[i]) / cfg.moreau;
          x[i] += -delta * drift + noise * vs.normal();
        }
        break;
      }
      case Algorithm::mala: {
        for (std::size_t i = 0; i < n; ++i)
          prop[i] = x[i] - delta * g[i] + noise * vs.normal();
        const double fp = phi.value(prop);
        double log_alpha = -kInf;
        if (std::isfinite(fp)) {
          phi.grad(prop, gp);
          double fwd = 0.0, bwd = 0.0;  // |prop - x + delta g|^2, |x - prop + delta gp|^2
          for (std::size_t i = 0; i < n; ++i) {
            const double df = prop[i] - x[i] + delta * g[i];
            const double db = x[i] - prop[i] + delta * gp[i];
            fwd += df * df;
            bwd += db * db;
          }
          log_alpha = fx - fp + (fwd - bwd) / (4.0 * delta);
        }
        ++proposals;
        if (std::log(vs.uniform()) < log_alpha) {
          x = prop;
          g = gp;
          fx = fp;
          if (k >= burn) ++accepted;
        }
        break;
      }
      case Algorithm::exact:
        break;  // handled above
    }
    if (k >= burn) {
      const std::size_t i = k - burn;
      if (constrained) {
        phi.domain().project(x, tmp);
        std::copy(tmp.begin(), tmp.end(), out.draws.begin() + i * n);
      } else {
        std::copy(x.begin(), x.end(), out.draws.begin() + i * n);
      }
    }
  }
  out.burn_in_discarded = burn;
  if (cfg.algorithm == Algorithm::mala) {
    out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.n_samples);
    out.low_acceptance_warning = out.acceptance_rate < 0.01;
  }
  return out;
}

namespace {

// Integrated autocorrelation time via Sokal's adaptive truncation.
double iact(const double* x, std::size_t n, double mean, double var) {
  if (var <= 0.0 || n < 8) return 1.0;
  double tau = 1.0;
  const std::size_t kmax = n / 5;
  for (std::size_t k = 1; k <= kmax; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) c += (x[i] - mean) * (x[i + k] - mean);
    c /= static_cast<double>(n - k) * var;
    tau += 2.0 * c;
    if (static_cast<double>(k) >= 5.0 * tau) break;
  }
  return std::max(tau, 1.0);
}

}  // namespace

MeanResult posterior_mean(const SampleSet& s) {
  if (s.count < 2) throw std::invalid_argument("posterior_mean: need at least 2 draws");
  const std::size_t n = s.dim, cnt = s.count;
  MeanResult out;
  out.mean.assign(n, 0.0);
  out.se.assign(n, 0.0);
  std::vector<double> col(cnt);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < cnt; ++i) col[i] = s.draws[i * n + j];
    const double m = kern::reduce_add(col.data(), cnt) / static_cast<double>(cnt);
    double var = 0.0;
    for (std::size_t i = 0; i < cnt; ++i) {
      const double d = col[i] - m;
      var += d * d;
    }
    var /= static_cast<double>(cnt - 1);
    double tau = 1.0;
    if (!s.iid) tau = iact(col.data(), cnt, m, var);
    out.mean[j] = m;
    out.se[j] = std::sqrt(var * tau / static_cast<double>(cnt));
  }
  return out;
}

}  // namespace lcb::sampler
