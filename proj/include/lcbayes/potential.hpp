#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lcbayes/errors.hpp"

namespace lcb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Smoothness { c3, c1, nonsmooth };

// Constraint set: all of R^n, or a coordinate box (bounds may be +-inf,
// which covers orthant cones and half-spaces aligned with the axes).
class Domain {
 public:
  enum class Kind { all, box };

  static Domain everything() { return Domain{}; }
  static Domain box(std::vector<double> lo, std::vector<double> hi) {
    Domain d;
    d.kind_ = Kind::box;
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    return d;
  }
  static Domain nonneg(std::size_t n) {
    return box(std::vector<double>(n, 0.0), std::vector<double>(n, kInf));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_all() const noexcept { return kind_ == Kind::all; }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }

  // Boundary points within tol count as inside; keeps indicator values exact
  // in the presence of rounding.
  bool contains(std::span<const double> x, double tol = 1e-12) const noexcept {
    if (kind_ == Kind::all) return true;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
    return true;
  }

  void project(std::span<const double> x, std::span<double> out) const;

  bool bounded() const noexcept {
    if (kind_ == Kind::all) return false;
    for (std::size_t i = 0; i < lo_.size(); ++i)
      if (lo_[i] == -kInf || hi_[i] == kInf) return false;
    return true;
  }

 private:
  Kind kind_ = Kind::all;
  std::vector<double> lo_, hi_;
};

// Oracle bundle for a proper convex potential phi. The posterior is
// p(x|y) ∝ exp(-phi(x)); everything downstream (divergences, MAP solves,
// samplers, audits) works through this interface.
//
// Composite convention: phi = smooth part + nonsmooth part, where the
// nonsmooth part may be a regulariser (|x|) and/or the domain indicator.
// Fully smooth models have a zero nonsmooth part.
class Potential {
 public:
  virtual ~Potential() = default;

  std::size_t dim() const noexcept { return n_; }
  Smoothness smoothness() const noexcept { return smoothness_; }
  // strong convexity modulus m >= 0
  double convexity_modulus() const noexcept { return m_; }
  // gradient Lipschitz constant of the full potential (inf allowed)
  double grad_lipschitz() const noexcept { return lip_; }
  // gradient Lipschitz constant of the smooth part only
  double smooth_lipschitz() const noexcept { return smooth_lip_; }
  const Domain& domain() const noexcept { return domain_; }

  // phi(x); +inf iff x lies outside the domain.
  double value(std::span<const double> x) const {
    check_dim(x);
    if (!domain_.contains(x)) return kInf;
    return value_impl(x);
  }

  // Gradient where phi is smooth. Throws NonSmoothPointError at documented
  // kinks and DomainViolation outside the domain.
  void grad(std::span<const double> x, std::span<double> g) const {
    check_dim(x);
    check_dim(g);
    if (!domain_.contains(x)) throw DomainViolation(name_ + ": grad outside domain");
    grad_impl(x, g);
  }

  // One element of the subdifferential; the minimum-Euclidean-norm element
  // at non-smooth points, the gradient elsewhere.
  void subgrad(std::span<const double> x, std::span<double> q) const {
    check_dim(x);
    check_dim(q);
    if (!domain_.contains(x)) throw DomainViolation(name_ + ": subgrad outside domain");
    subgrad_impl(x, q);
  }

  bool has_hessian() const noexcept { return has_hessian_; }

  // out = (∇²phi)(x) v on the smooth interior.
  void hessian_vec(std::span<const double> x, std::span<const double> v,
                   std::span<double> out) const {
    if (!has_hessian_) throw UnsupportedOperation(name_ + ": no Hessian oracle");
    check_dim(x);
    check_dim(v);
    check_dim(out);
    hessian_vec_impl(x, v, out);
  }

  // prox_{gamma phi}(u) = argmin_v phi(v) + |v-u|^2/(2 gamma).
  void prox(std::span<const double> u, double gamma, std::span<double> out) const {
    check_dim(u);
    check_dim(out);
    if (!(gamma > 0.0)) throw std::invalid_argument(name_ + ": prox needs gamma > 0");
    prox_impl(u, gamma, out);
  }

  // Smooth part oracles (the whole of phi for smooth models).
  double smooth_value(std::span<const double> x) const {
    check_dim(x);
    return smooth_value_impl(x);
  }
  void smooth_grad(std::span<const double> x, std::span<double> g) const {
    check_dim(x);
    check_dim(g);
    smooth_grad_impl(x, g);
  }

  // True if phi has a non-trivial nonsmooth part (regulariser or indicator).
  bool has_nonsmooth() const noexcept { return has_nonsmooth_; }
  // True if the nonsmooth part is exactly the domain indicator.
  bool nonsmooth_is_indicator() const noexcept { return nonsmooth_is_indicator_; }

  // Value of the nonsmooth part (indicator included: +inf outside domain).
  double nonsmooth_value(std::span<const double> x) const {
    check_dim(x);
    if (!domain_.contains(x)) return kInf;
    return nonsmooth_value_impl(x);
  }

  // prox of the nonsmooth part alone (projection when it is an indicator).
  void nonsmooth_prox(std::span<const double> u, double gamma, std::span<double> out) const {
    check_dim(u);
    check_dim(out);
    if (!(gamma > 0.0)) throw std::invalid_argument(name_ + ": prox needs gamma > 0");
    nonsmooth_prox_impl(u, gamma, out);
  }

  const std::string& name() const noexcept { return name_; }

 protected:
  Potential(std::string name, std::size_t n, Smoothness s, double m, double lip,
            double smooth_lip, Domain domain)
      : name_(std::move(name)),
        n_(n),
        smoothness_(s),
        m_(m),
        lip_(lip),
        smooth_lip_(smooth_lip),
        domain_(std::move(domain)) {}

  void set_has_hessian(bool b) noexcept { has_hessian_ = b; }
  void set_nonsmooth(bool has, bool indicator_only) noexcept {
    has_nonsmooth_ = has;
    nonsmooth_is_indicator_ = indicator_only;
  }

  virtual double value_impl(std::span<const double> x) const = 0;
  virtual void grad_impl(std::span<const double> x, std::span<double> g) const = 0;
  virtual void subgrad_impl(std::span<const double> x, std::span<double> q) const {
    grad_impl(x, q);
  }
  virtual void hessian_vec_impl(std::span<const double>, std::span<const double>,
                                std::span<double>) const {
    throw UnsupportedOperation(name_ + ": no Hessian oracle");
  }
  virtual void prox_impl(std::span<const double> u, double gamma,
                         std::span<double> out) const = 0;
  virtual double smooth_value_impl(std::span<const double> x) const { return value_impl(x); }
  virtual void smooth_grad_impl(std::span<const double> x, std::span<double> g) const {
    grad_impl(x, g);
  }
  virtual double nonsmooth_value_impl(std::span<const double>) const { return 0.0; }
  virtual void nonsmooth_prox_impl(std::span<const double> u, double,
                                   std::span<double> out) const {
    std::copy(u.begin(), u.end(), out.begin());
  }

  void check_dim(std::span<const double> x) const {
    if (x.size() != n_)
      throw std::invalid_argument(name_ + ": expected dimension " + std::to_string(n_) +
                                  ", got " + std::to_string(x.size()));
  }

  // Solves gamma * psi'(v) + v - u = 0 for a scalar convex psi by a guarded
  // Newton/bisection hybrid; the prox fallback for separable models without
  // a closed form. dpsi must be nondecreasing.
  static double prox_newton_1d(double u, double gamma,
                               double (*dpsi)(double, const void*),
                               double (*d2psi)(double, const void*), const void* ctx,
                               double tol = 1e-10);

 private:
  std::string name_;
  std::size_t n_;
  Smoothness smoothness_;
  double m_;
  double lip_;
  double smooth_lip_;
  Domain domain_;
  bool has_hessian_ = false;
  bool has_nonsmooth_ = false;
  bool nonsmooth_is_indicator_ = false;
};

}  // namespace lcb
