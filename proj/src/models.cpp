#include "lcbayes/models.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "lcbayes/kernels.hpp"
#include "lcbayes/linalg.hpp"
#include "lcbayes/normal.hpp"
#include "lcbayes/quadrature.hpp"

namespace lcb {
namespace {

using nlohmann::json;

constexpr double kEulerMascheroni = 0.57721566490153286060651209;

std::size_t param_dim(const json& p, std::size_t fallback) {
  if (p.contains("n")) return p.at("n").get<std::size_t>();
  return fallback;
}

std::vector<double> param_vec(const json& p, const char* key, std::size_t n, double fill) {
  if (!p.contains(key)) return std::vector<double>(n, fill);
  const auto& v = p.at(key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  auto out = v.get<std::vector<double>>();
  if (out.size() != n)
    throw std::invalid_argument(std::string("parameter '") + key + "' has length " +
                                std::to_string(out.size()) + ", expected " +
                                std::to_string(n));
  return out;
}

// ---------------------------------------------------------------------------
// gaussian: phi(x) = 1/2 sum (x_i - mu_i)^2 / cov_i
// ---------------------------------------------------------------------------

class GaussianPotential final : public Potential {
 public:
  GaussianPotential(std::vector<double> mu, std::vector<double> cov)
      : Potential("gaussian", mu.size(), Smoothness::c3,
                  1.0 / *std::max_element(cov.begin(), cov.end()),
                  1.0 / *std::min_element(cov.begin(), cov.end()),
                  1.0 / *std::min_element(cov.begin(), cov.end()), Domain::everything()),
        mu_(std::move(mu)),
        w_(cov.size()) {
    for (std::size_t i = 0; i < cov.size(); ++i) {
      if (!(cov[i] > 0.0)) throw std::invalid_argument("gaussian: cov must be positive");
      w_[i] = 1.0 / cov[i];
    }
    cov_ = std::move(cov);
    set_has_hessian(true);
  }

  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& cov() const { return cov_; }

 private:
  double value_impl(std::span<const double> x) const override {
    return 0.5 * kern::reduce_wsqdev(x.data(), mu_.data(), w_.data(), x.size());
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = w_[i] * (x[i] - mu_[i]);
  }
  void hessian_vec_impl(std::span<const double>, std::span<const double> v,
                        std::span<double> out) const override {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = w_[i] * v[i];
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = (cov_[i] * u[i] + gamma * mu_[i]) / (cov_[i] + gamma);
  }

  std::vector<double> mu_, cov_, w_;
};

class GaussianSampler final : public ExactSampler {
 public:
  GaussianSampler(std::vector<double> mu, const std::vector<double>& cov)
      : mu_(std::move(mu)), sd_(cov.size()) {
    for (std::size_t i = 0; i < cov.size(); ++i) sd_[i] = std::sqrt(cov[i]);
  }
  void draw(VariateStream& vs, std::span<double> out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu_[i] + sd_[i] * vs.normal();
  }

 private:
  std::vector<double> mu_, sd_;
};

// ---------------------------------------------------------------------------
// gaussian_linear: phi(x) = |y - A x|^2 / (2 sigma^2)
// ---------------------------------------------------------------------------

class GaussLinearPotential final : public Potential {
 public:
  GaussLinearPotential(Mat a, std::vector<double> y, double sigma, const Mat& gram_mat,
                       double lmin, double lmax)
      : Potential("gaussian_linear", a.cols(), Smoothness::c3, lmin / (sigma * sigma),
                  lmax / (sigma * sigma), lmax / (sigma * sigma), Domain::everything()),
        a_(std::move(a)),
        y_(std::move(y)),
        inv_s2_(1.0 / (sigma * sigma)),
        gram_(gram_mat) {
    aty_.resize(dim());
    matvec_t(a_, y_, aty_);
    set_has_hessian(true);
  }

  const Mat& design() const { return a_; }

 private:
  double value_impl(std::span<const double> x) const override {
    std::vector<double> r(a_.rows());
    matvec(a_, x, r);
    kern::sub(y_.data(), r.data(), r.data(), r.size());
    return 0.5 * inv_s2_ * kern::reduce_sq(r.data(), r.size());
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    // g = (A'A x - A'y) / sigma^2
    std::vector<double> t(dim());
    matvec(gram_, x, t);
    for (std::size_t i = 0; i < t.size(); ++i) g[i] = inv_s2_ * (t[i] - aty_[i]);
  }
  void hessian_vec_impl(std::span<const double>, std::span<const double> v,
                        std::span<double> out) const override {
    matvec(gram_, v, out);
    kern::scale(inv_s2_, out.data(), out.data(), out.size());
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    // (I + gamma/s2 A'A) v = u + gamma/s2 A'y
    std::lock_guard<std::mutex> lock(mu_);
    if (gamma != cached_gamma_) {
      factor_ = gram_;
      const double c = gamma * inv_s2_;
      for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j)
          factor_(i, j) = (i == j ? 1.0 : 0.0) + c * gram_(i, j);
      if (!cholesky(factor_))
        throw ConvergenceError("gaussian_linear: prox factorization failed", 0.0);
      cached_gamma_ = gamma;
    }
    std::vector<double> rhs(dim());
    for (std::size_t i = 0; i < dim(); ++i) rhs[i] = u[i] + gamma * inv_s2_ * aty_[i];
    chol_solve(factor_, rhs, out);
  }

  Mat a_;
  std::vector<double> y_, aty_;
  double inv_s2_;
  Mat gram_;
  mutable std::mutex mu_;
  mutable Mat factor_;
  mutable double cached_gamma_ = -1.0;
};

class GaussLinearSampler final : public ExactSampler {
 public:
  GaussLinearSampler(std::vector<double> map, Mat chol_gram, double sigma)
      : map_(std::move(map)), chol_(std::move(chol_gram)), sigma_(sigma) {}
  void draw(VariateStream& vs, std::span<double> out) const override {
    // x = map + sigma * L^{-T} z  with A'A = L L'
    std::vector<double> z(out.size()), w(out.size());
    for (auto& zi : z) zi = vs.normal();
    solve_lower_t(chol_, z, w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = map_[i] + sigma_ * w[i];
  }

 private:
  std::vector<double> map_;
  Mat chol_;
  double sigma_;
};

// ---------------------------------------------------------------------------
// laplace_iid: phi(x) = sum |x_i|
// ---------------------------------------------------------------------------

class LaplacePotential final : public Potential {
 public:
  explicit LaplacePotential(std::size_t n)
      : Potential("laplace_iid", n, Smoothness::nonsmooth, 0.0, kInf, 0.0,
                  Domain::everything()) {
    set_nonsmooth(true, false);
  }

 private:
  double value_impl(std::span<const double> x) const override {
    return kern::reduce_abs(x.data(), x.size());
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0)
        throw NonSmoothPointError("laplace_iid: |x| has no gradient at a zero coordinate");
      g[i] = x[i] > 0.0 ? 1.0 : -1.0;
    }
  }
  void subgrad_impl(std::span<const double> x, std::span<double> q) const override {
    // minimum-norm element of the subdifferential: 0 at kinks
    for (std::size_t i = 0; i < x.size(); ++i)
      q[i] = x[i] == 0.0 ? 0.0 : (x[i] > 0.0 ? 1.0 : -1.0);
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    kern::soft_threshold(u.data(), gamma, out.data(), u.size());
  }
  double smooth_value_impl(std::span<const double>) const override { return 0.0; }
  void smooth_grad_impl(std::span<const double>, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 0.0);
  }
  double nonsmooth_value_impl(std::span<const double> x) const override {
    return kern::reduce_abs(x.data(), x.size());
  }
  void nonsmooth_prox_impl(std::span<const double> u, double gamma,
                           std::span<double> out) const override {
    kern::soft_threshold(u.data(), gamma, out.data(), u.size());
  }
};

class LaplaceSampler final : public ExactSampler {
 public:
  void draw(VariateStream& vs, std::span<double> out) const override {
    for (auto& o : out) o = vs.laplace();
  }
};

// ---------------------------------------------------------------------------
// lasso_1d: phi(x) = 1/2 (x - y)^2 + lambda |x|
// ---------------------------------------------------------------------------

class Lasso1dPotential final : public Potential {
 public:
  Lasso1dPotential(double y, double lambda)
      : Potential("lasso_1d", 1, Smoothness::nonsmooth, 1.0, kInf, 1.0,
                  Domain::everything()),
        y_(y),
        lambda_(lambda) {
    set_nonsmooth(lambda > 0.0, false);
    set_has_hessian(true);
  }

 private:
  double value_impl(std::span<const double> x) const override {
    const double d = x[0] - y_;
    return 0.5 * d * d + lambda_ * std::fabs(x[0]);
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    if (x[0] == 0.0 && lambda_ > 0.0)
      throw NonSmoothPointError("lasso_1d: kink at the origin");
    g[0] = (x[0] - y_) + (x[0] > 0.0 ? lambda_ : (x[0] < 0.0 ? -lambda_ : 0.0));
  }
  void subgrad_impl(std::span<const double> x, std::span<double> q) const override {
    if (x[0] != 0.0) {
      grad_impl(x, q);
      return;
    }
    const double a = -y_ - lambda_, b = -y_ + lambda_;
    q[0] = (a <= 0.0 && 0.0 <= b) ? 0.0 : (std::fabs(a) < std::fabs(b) ? a : b);
  }
  void hessian_vec_impl(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const override {
    if (x[0] == 0.0 && lambda_ > 0.0)
      throw NonSmoothPointError("lasso_1d: kink at the origin");
    out[0] = v[0];
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    const double v = (u[0] + gamma * y_) / (1.0 + gamma);
    const double t = gamma * lambda_ / (1.0 + gamma);
    kern::soft_threshold(&v, t, out.data(), 1);
  }
  double smooth_value_impl(std::span<const double> x) const override {
    const double d = x[0] - y_;
    return 0.5 * d * d;
  }
  void smooth_grad_impl(std::span<const double> x, std::span<double> g) const override {
    g[0] = x[0] - y_;
  }
  double nonsmooth_value_impl(std::span<const double> x) const override {
    return lambda_ * std::fabs(x[0]);
  }
  void nonsmooth_prox_impl(std::span<const double> u, double gamma,
                           std::span<double> out) const override {
    kern::soft_threshold(u.data(), gamma * lambda_, out.data(), 1);
  }

  double y_, lambda_;
};

// ---------------------------------------------------------------------------
// quartic: phi(x) = sum x_i^4
// ---------------------------------------------------------------------------

class QuarticPotential final : public Potential {
 public:
  explicit QuarticPotential(std::size_t n)
      : Potential("quartic", n, Smoothness::c3, 0.0, kInf, kInf, Domain::everything()) {
    set_has_hessian(true);
  }

 private:
  double value_impl(std::span<const double> x) const override {
    return kern::reduce_quart(x.data(), x.size());
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 4.0 * x[i] * x[i] * x[i];
  }
  void hessian_vec_impl(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const override {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 12.0 * x[i] * x[i] * v[i];
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = prox_newton_1d(
          u[i], gamma, [](double v, const void*) { return 4.0 * v * v * v; },
          [](double v, const void*) { return 12.0 * v * v; }, nullptr);
  }
};

class QuarticSampler final : public ExactSampler {
 public:
  void draw(VariateStream& vs, std::span<double> out) const override {
    // |x| = G^{1/4} with G ~ Gamma(1/4,1); sign uniform
    for (auto& o : out) {
      const double g = vs.gamma(0.25);
      const double m = std::pow(g, 0.25);
      o = (vs.raw() & 1u) ? m : -m;
    }
  }
};

// ---------------------------------------------------------------------------
// exp_linear: phi(x) = sum (e^{x_i} - x_i)
// ---------------------------------------------------------------------------

class ExpLinearPotential final : public Potential {
 public:
  explicit ExpLinearPotential(std::size_t n)
      : Potential("exp_linear", n, Smoothness::c3, 0.0, kInf, kInf, Domain::everything()) {
    set_has_hessian(true);
  }

 private:
  double value_impl(std::span<const double> x) const override {
    double s = 0.0;
    for (double xi : x) s += std::exp(xi) - xi;
    return s;
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = std::exp(x[i]) - 1.0;
  }
  void hessian_vec_impl(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const override {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]) * v[i];
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = prox_newton_1d(
          u[i], gamma, [](double v, const void*) { return std::expm1(v); },
          [](double v, const void*) { return std::exp(v); }, nullptr);
  }
};

class ExpLinearSampler final : public ExactSampler {
 public:
  void draw(VariateStream& vs, std::span<double> out) const override {
    for (auto& o : out) o = std::log(vs.exponential());
  }
};

// ---------------------------------------------------------------------------
// exponential_cone: phi(x) = sum x_i + indicator{x >= 0}
// ---------------------------------------------------------------------------

class ExponentialConePotential final : public Potential {
 public:
  explicit ExponentialConePotential(std::size_t n)
      : Potential("exponential_cone", n, Smoothness::c3, 0.0, kInf, 0.0,
                  Domain::nonneg(n)) {
    set_nonsmooth(true, true);
    set_has_hessian(true);
  }

 private:
  double value_impl(std::span<const double> x) const override {
    return kern::reduce_add(x.data(), x.size());
  }
  // gradient of the smooth part; valid on the domain
  void grad_impl(std::span<const double>, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 1.0);
  }
  void subgrad_impl(std::span<const double> x, std::span<double> q) const override {
    // min-norm element of 1 + N_{x>=0}: 0 on the active boundary
    for (std::size_t i = 0; i < x.size(); ++i) q[i] = x[i] <= 1e-12 ? 0.0 : 1.0;
  }
  void hessian_vec_impl(std::span<const double>, std::span<const double>,
                        std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::max(u[i] - gamma, 0.0);
  }
  double smooth_value_impl(std::span<const double> x) const override {
    return kern::reduce_add(x.data(), x.size());
  }
  void smooth_grad_impl(std::span<const double>, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 1.0);
  }
  void nonsmooth_prox_impl(std::span<const double> u, double, std::span<double> out) const override {
    domain().project(u, out);
  }
};

class ExponentialConeSampler final : public ExactSampler {
 public:
  void draw(VariateStream& vs, std::span<double> out) const override {
    for (auto& o : out) o = vs.exponential();
  }
};

// ---------------------------------------------------------------------------
// truncated_gaussian_box: phi(x) = 1/2 |x - mu|^2 + indicator{box}
// ---------------------------------------------------------------------------

class TruncatedGaussianBoxPotential final : public Potential {
 public:
  TruncatedGaussianBoxPotential(std::vector<double> mu, std::vector<double> lo,
                                std::vector<double> hi)
      : Potential("truncated_gaussian_box", mu.size(), Smoothness::c3, 1.0, kInf, 1.0,
                  Domain::box(lo, hi)),
        mu_(std::move(mu)) {
    set_nonsmooth(true, true);
    set_has_hessian(true);
  }

  const std::vector<double>& mu() const { return mu_; }

 private:
  double value_impl(std::span<const double> x) const override {
    return 0.5 * kern::reduce_sqdev(x.data(), mu_.data(), x.size());
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    kern::sub(x.data(), mu_.data(), g.data(), x.size());
  }
  void subgrad_impl(std::span<const double> x, std::span<double> q) const override {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double gi = x[i] - mu_[i];
      const bool at_lo = x[i] <= domain().lo()[i] + 1e-12;
      const bool at_hi = x[i] >= domain().hi()[i] - 1e-12;
      if (at_lo)
        q[i] = gi >= 0.0 ? 0.0 : gi;  // set (-inf, gi]; min-norm
      else if (at_hi)
        q[i] = gi <= 0.0 ? 0.0 : gi;  // set [gi, inf)
      else
        q[i] = gi;
    }
  }
  void hessian_vec_impl(std::span<const double>, std::span<const double> v,
                        std::span<double> out) const override {
    std::copy(v.begin(), v.end(), out.begin());
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      t[i] = (u[i] + gamma * mu_[i]) / (1.0 + gamma);
    domain().project(t, out);
  }
  double smooth_value_impl(std::span<const double> x) const override {
    return 0.5 * kern::reduce_sqdev(x.data(), mu_.data(), x.size());
  }
  void smooth_grad_impl(std::span<const double> x, std::span<double> g) const override {
    kern::sub(x.data(), mu_.data(), g.data(), x.size());
  }
  void nonsmooth_prox_impl(std::span<const double> u, double, std::span<double> out) const override {
    domain().project(u, out);
  }

  std::vector<double> mu_;
};

class TruncatedGaussianSampler final : public ExactSampler {
 public:
  TruncatedGaussianSampler(std::vector<double> mu, std::vector<double> lo,
                           std::vector<double> hi)
      : mu_(std::move(mu)), plo_(mu_.size()), phi_(mu_.size()) {
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      plo_[i] = lo[i] == -kInf ? 0.0 : norm_cdf(lo[i] - mu_[i]);
      phi_[i] = hi[i] == kInf ? 1.0 : norm_cdf(hi[i] - mu_[i]);
    }
  }
  void draw(VariateStream& vs, std::span<double> out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double p = plo_[i] + vs.uniform() * (phi_[i] - plo_[i]);
      out[i] = mu_[i] + norm_quantile(p);
    }
  }

 private:
  std::vector<double> mu_, plo_, phi_;
};

// ---------------------------------------------------------------------------
// exp_cone: phi(x) = sum e^{x_i} + indicator{x >= 0}
// ---------------------------------------------------------------------------

class ExpConePotential final : public Potential {
 public:
  explicit ExpConePotential(std::size_t n)
      : Potential("exp_cone", n, Smoothness::c3, 1.0, kInf, kInf, Domain::nonneg(n)) {
    set_nonsmooth(true, true);
    set_has_hessian(true);
  }

 private:
  double value_impl(std::span<const double> x) const override {
    double s = 0.0;
    for (double xi : x) s += std::exp(xi);
    return s;
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = std::exp(x[i]);
  }
  void subgrad_impl(std::span<const double> x, std::span<double> q) const override {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double gi = std::exp(x[i]);
      q[i] = (x[i] <= 1e-12 && gi >= 0.0) ? 0.0 : gi;  // boundary admits q=0
    }
  }
  void hessian_vec_impl(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const override {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]) * v[i];
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double v = prox_newton_1d(
          u[i], gamma, [](double t, const void*) { return std::exp(t); },
          [](double t, const void*) { return std::exp(t); }, nullptr);
      out[i] = std::max(v, 0.0);
    }
  }
  double smooth_value_impl(std::span<const double> x) const override {
    double s = 0.0;
    for (double xi : x) s += std::exp(xi);
    return s;
  }
  void smooth_grad_impl(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = std::exp(x[i]);
  }
  void nonsmooth_prox_impl(std::span<const double> u, double, std::span<double> out) const override {
    domain().project(u, out);
  }
};

class ExpConeSampler final : public ExactSampler {
 public:
  void draw(VariateStream& vs, std::span<double> out) const override {
    // t = e^x has density e^{-t}/t on [1,inf); propose t = 1+Exp(1),
    // accept with probability 1/t.
    for (auto& o : out) {
      for (;;) {
        const double t = 1.0 + vs.exponential();
        if (vs.uniform() * t <= 1.0) {
          o = std::log(t);
          break;
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// tilted potential: phi(u) - shift' u on the smooth part
// ---------------------------------------------------------------------------

class TiltedPotential final : public Potential {
 public:
  TiltedPotential(std::shared_ptr<const Potential> base, std::vector<double> shift)
      : Potential(base->name() + "+tilt", base->dim(), base->smoothness(),
                  base->convexity_modulus(), base->grad_lipschitz(),
                  base->smooth_lipschitz(), base->domain()),
        base_(std::move(base)),
        shift_(std::move(shift)) {
    set_has_hessian(base_->has_hessian());
    set_nonsmooth(base_->has_nonsmooth(), base_->nonsmooth_is_indicator());
  }

 private:
  double value_impl(std::span<const double> x) const override {
    const double v = base_->value(x);
    return std::isfinite(v) ? v - kern::dot(shift_.data(), x.data(), x.size()) : v;
  }
  void grad_impl(std::span<const double> x, std::span<double> g) const override {
    base_->grad(x, g);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= shift_[i];
  }
  void subgrad_impl(std::span<const double> x, std::span<double> q) const override {
    base_->subgrad(x, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= shift_[i];
  }
  void hessian_vec_impl(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const override {
    base_->hessian_vec(x, v, out);
  }
  void prox_impl(std::span<const double> u, double gamma, std::span<double> out) const override {
    // prox of phi - shift'u is the base prox at u + gamma*shift
    std::vector<double> t(u.size());
    kern::axpy(gamma, shift_.data(), u.data(), t.data(), u.size());
    base_->prox(t, gamma, out);
  }
  double smooth_value_impl(std::span<const double> x) const override {
    return base_->smooth_value(x) - kern::dot(shift_.data(), x.data(), x.size());
  }
  void smooth_grad_impl(std::span<const double> x, std::span<double> g) const override {
    base_->smooth_grad(x, g);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= shift_[i];
  }
  double nonsmooth_value_impl(std::span<const double> x) const override {
    return base_->nonsmooth_value(x);
  }
  void nonsmooth_prox_impl(std::span<const double> u, double gamma,
                           std::span<double> out) const override {
    base_->nonsmooth_prox(u, gamma, out);
  }

  std::shared_ptr<const Potential> base_;
  std::vector<double> shift_;
};

// Reference moments of a 1-D density exp(-psi(t)) on [a,b] by quadrature.
struct Moment1d {
  double z, mean, second_central;  // second moment about `center`
};

Moment1d truncated_moments(const std::function<double(double)>& neg_log, double a, double b,
                           double center) {
  const double z = integrate_adaptive([&](double t) { return std::exp(-neg_log(t)); }, a, b);
  const double m = integrate_adaptive([&](double t) { return t * std::exp(-neg_log(t)); }, a, b) / z;
  const double s = integrate_adaptive(
                       [&](double t) {
                         const double d = t - center;
                         return d * d * std::exp(-neg_log(t));
                       },
                       a, b) /
                   z;
  return {z, m, s};
}

}  // namespace

const std::vector<std::string>& zoo_names() {
  static const std::vector<std::string> names = {
      "gaussian",         "gaussian_linear", "laplace_iid",
      "lasso_1d",         "quartic",         "exp_linear",
      "exponential_cone", "truncated_gaussian_box", "exp_cone"};
  return names;
}

std::string nearest_zoo_name(const std::string& name) {
  auto dist = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      cur[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      }
      std::swap(prev, cur);
    }
    return prev[b.size()];
  };
  std::string best;
  std::size_t best_d = static_cast<std::size_t>(-1);
  for (const auto& z : zoo_names()) {
    const auto d = dist(name, z);
    if (d < best_d) {
      best_d = d;
      best = z;
    }
  }
  return best;
}

ModelInstance make_model(const std::string& name) { return make_model(name, json::object()); }

ModelInstance make_model(const std::string& name, const json& params) {
  ModelInstance m;
  m.name = name;

  if (name == "gaussian") {
    std::size_t n = param_dim(params, params.contains("mu") ? params.at("mu").size() : 2);
    auto mu = param_vec(params, "mu", n, 0.0);
    auto cov = param_vec(params, "cov", n, 1.0);
    m.potential = std::make_shared<GaussianPotential>(mu, cov);
    m.sampler = std::make_shared<GaussianSampler>(mu, cov);
    m.refs.map_point = mu;
    m.refs.mean = mu;
    m.refs.phi_gap = 0.5 * static_cast<double>(n);
    m.refs.score = std::vector<double>(n, 0.0);
    return m;
  }

  if (name == "gaussian_linear") {
    Mat a;
    if (params.contains("A")) {
      const auto rows = params.at("A").get<std::vector<std::vector<double>>>();
      a = Mat(rows.size(), rows.at(0).size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != a.cols())
          throw std::invalid_argument("gaussian_linear: ragged matrix A");
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = rows[i][j];
      }
    } else {
      a = Mat(3, 2);
      a(0, 0) = 1.5; a(0, 1) = 0.2;
      a(1, 0) = 0.0; a(1, 1) = 1.0;
      a(2, 0) = 0.3; a(2, 1) = 0.7;
    }
    auto y = param_vec(params, "y", a.rows(), 0.0);
    if (!params.contains("y")) {
      y = {1.0, 0.5, 0.2};
      y.resize(a.rows(), 0.5);
    }
    const double sigma = params.value("sigma", 1.0);
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_linear: sigma must be > 0");
    Mat g = gram(a);
    const double lmax = eig_max_spd(g), lmin = eig_min_spd(g);
    if (!(lmin > 0.0))
      throw std::invalid_argument("gaussian_linear: A must have full column rank");
    m.potential = std::make_shared<GaussLinearPotential>(a, y, sigma, g, lmin, lmax);
    // map = (A'A)^{-1} A'y
    Mat chol = g;
    cholesky(chol);
    std::vector<double> aty(a.cols()), map(a.cols());
    matvec_t(a, y, aty);
    chol_solve(chol, aty, map);
    m.sampler = std::make_shared<GaussLinearSampler>(map, chol, sigma);
    m.refs.map_point = map;
    m.refs.mean = map;
    m.refs.phi_gap = 0.5 * static_cast<double>(a.cols());
    m.refs.score = std::vector<double>(a.cols(), 0.0);
    return m;
  }

  if (name == "laplace_iid") {
    const std::size_t n = param_dim(params, 1);
    m.potential = std::make_shared<LaplacePotential>(n);
    m.sampler = std::make_shared<LaplaceSampler>();
    m.refs.map_point = std::vector<double>(n, 0.0);
    m.refs.mean = std::vector<double>(n, 0.0);
    m.refs.phi_gap = static_cast<double>(n);  // E|x_i| = 1
    return m;
  }

  if (name == "lasso_1d") {
    const double y = params.value("y", 2.0);
    const double lambda = params.value("lambda", 1.0);
    if (!(lambda >= 0.0)) throw std::invalid_argument("lasso_1d: lambda must be >= 0");
    m.potential = std::make_shared<Lasso1dPotential>(y, lambda);
    double st[1];
    kern::soft_threshold(&y, lambda, st, 1);
    m.refs.map_point = std::vector<double>{st[0]};
    // posterior mean by quadrature; the density is log-concave and light-tailed
    const double lo = y - 14.0, hi = y + 14.0;
    const auto mom = truncated_moments(
        [&](double t) { return 0.5 * (t - y) * (t - y) + lambda * std::fabs(t); }, lo, hi, 0.0);
    m.refs.mean = std::vector<double>{mom.mean};
    return m;
  }

  if (name == "quartic") {
    const std::size_t n = param_dim(params, 1);
    m.potential = std::make_shared<QuarticPotential>(n);
    m.sampler = std::make_shared<QuarticSampler>();
    m.refs.map_point = std::vector<double>(n, 0.0);
    m.refs.mean = std::vector<double>(n, 0.0);
    m.refs.phi_gap = 0.25 * static_cast<double>(n);  // E[x^4] = E[Gamma(1/4)] = 1/4
    m.refs.score = std::vector<double>(n, 0.0);
    return m;
  }

  if (name == "exp_linear") {
    const std::size_t n = param_dim(params, 1);
    m.potential = std::make_shared<ExpLinearPotential>(n);
    m.sampler = std::make_shared<ExpLinearSampler>();
    m.refs.map_point = std::vector<double>(n, 0.0);
    m.refs.mean = std::vector<double>(n, -kEulerMascheroni);
    m.refs.phi_gap = kEulerMascheroni * static_cast<double>(n);
    m.refs.score = std::vector<double>(n, 0.0);
    return m;
  }

  if (name == "exponential_cone") {
    const std::size_t n = param_dim(params, 3);
    m.potential = std::make_shared<ExponentialConePotential>(n);
    m.sampler = std::make_shared<ExponentialConeSampler>();
    m.refs.map_point = std::vector<double>(n, 0.0);
    m.refs.mean = std::vector<double>(n, 1.0);
    m.refs.phi_gap = static_cast<double>(n);
    m.refs.score = std::vector<double>(n, 1.0);
    // shifted-MAP objective is identically zero on the cone: no reference point
    return m;
  }

  if (name == "truncated_gaussian_box") {
    std::size_t n = param_dim(params, params.contains("mu") ? params.at("mu").size() : 1);
    auto mu = param_vec(params, "mu", n, 1.0);
    auto lo = param_vec(params, "lo", n, 0.0);
    auto hi = param_vec(params, "hi", n, kInf);
    m.potential = std::make_shared<TruncatedGaussianBoxPotential>(mu, lo, hi);
    m.sampler = std::make_shared<TruncatedGaussianSampler>(mu, lo, hi);
    std::vector<double> map(n), mean(n), score(n), shifted(n);
    double e_phi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      map[i] = std::clamp(mu[i], lo[i], hi[i]);
      const double a = std::max(lo[i], mu[i] - 13.0), b = std::min(hi[i], mu[i] + 13.0);
      const auto mom = truncated_moments(
          [&](double t) { return 0.5 * (t - mu[i]) * (t - mu[i]); }, a, b, mu[i]);
      mean[i] = mom.mean;
      score[i] = mom.mean - mu[i];
      e_phi += 0.5 * mom.second_central;
      shifted[i] = std::clamp(mu[i] + score[i], lo[i], hi[i]);
    }
    std::vector<double> d(n);
    kern::sub(map.data(), mu.data(), d.data(), n);
    m.refs.map_point = map;
    m.refs.mean = mean;
    m.refs.phi_gap = e_phi - 0.5 * kern::reduce_sq(d.data(), n);
    m.refs.score = score;
    m.refs.shifted_map = shifted;
    return m;
  }

  if (name == "exp_cone") {
    const std::size_t n = param_dim(params, 1);
    m.potential = std::make_shared<ExpConePotential>(n);
    m.sampler = std::make_shared<ExpConeSampler>();
    // density exp(-e^x) on [0, inf); truncate where e^{-e^x} ~ 1e-40
    const auto mom = truncated_moments([](double t) { return std::exp(t); }, 0.0, 4.6, 0.0);
    const double e_ex =
        integrate_adaptive([](double t) { return std::exp(t - std::exp(t)); }, 0.0, 4.6) /
        mom.z;
    std::vector<double> shifted(n, std::max(0.0, std::log(e_ex)));
    m.refs.map_point = std::vector<double>(n, 0.0);
    m.refs.mean = std::vector<double>(n, mom.mean);
    m.refs.phi_gap = (e_ex - 1.0) * static_cast<double>(n);
    m.refs.score = std::vector<double>(n, e_ex);
    m.refs.shifted_map = shifted;
    return m;
  }

  throw std::invalid_argument("unknown model '" + name + "' (did you mean '" +
                              nearest_zoo_name(name) + "'?)");
}

std::shared_ptr<const Potential> tilt_potential(std::shared_ptr<const Potential> base,
                                                std::vector<double> shift) {
  return std::make_shared<TiltedPotential>(std::move(base), std::move(shift));
}

}  // namespace lcb
