#include "lcbayes/geometry.hpp"

#include <cmath>
#include <cstdio>

#include "lcbayes/kernels.hpp"
#include "lcbayes/quadrature.hpp"

namespace lcb::geometry {
namespace {

void require_in_domain(const Potential& phi, std::span<const double> p, const char* who) {
  if (!phi.domain().contains(p))
    throw DomainViolation(std::string(who) + ": point outside the domain of " + phi.name());
}

double clip_roundoff(double v, double scale) {
  if (v < 0.0 && v > -1e-10 * (1.0 + scale)) return 0.0;
  return v;
}

}  // namespace

DivergenceValue bregman(const Potential& phi, std::span<const double> u,
                        std::span<const double> x) {
  require_in_domain(phi, u, "bregman");
  require_in_domain(phi, x, "bregman");
  std::vector<double> g(phi.dim());
  try {
    phi.grad(x, g);
  } catch (const NonSmoothPointError&) {
    throw NonSmoothPointError(
        "bregman: " + phi.name() +
        " is not smooth at x; use generalized_dual with an explicit subgradient");
  }
  std::vector<double> d(phi.dim());
  kern::sub(u.data(), x.data(), d.data(), phi.dim());
  const double pu = phi.value(u), px = phi.value(x);
  DivergenceValue out;
  out.form = DivForm::bregman_primal;
  out.value = clip_roundoff(pu - px - kern::dot(g.data(), d.data(), phi.dim()),
                            std::fabs(pu) + std::fabs(px));
  return out;
}

DivergenceValue dual_bregman(const Potential& phi, std::span<const double> u,
                             std::span<const double> x) {
  DivergenceValue out = bregman(phi, x, u);
  out.form = DivForm::bregman_dual;
  return out;
}

DivergenceValue generalized_dual(const Potential& phi, std::span<const double> s,
                                 std::span<const double> x, std::span<const double> q) {
  require_in_domain(phi, s, "generalized_dual");
  require_in_domain(phi, x, "generalized_dual");
  const std::size_t n = phi.dim();
  DivergenceValue out;
  out.form = DivForm::generalized_dual;
  out.subgradient = std::vector<double>(q.begin(), q.end());

  // warn-only validity check of q via the subgradient inequality on a few
  // sampled directions around s (and at x itself)
  const double ps = phi.value(s);
  auto violates = [&](std::span<const double> z) {
    const double pz = phi.value(z);
    if (!std::isfinite(pz)) return false;
    std::vector<double> d(n);
    kern::sub(z.data(), s.data(), d.data(), n);
    const double lin = ps + kern::dot(q.data(), d.data(), n);
    return pz < lin - 1e-8 * (1.0 + std::fabs(pz));
  };
  if (violates(x)) out.subgrad_warning = true;
  std::vector<double> z(s.begin(), s.end());
  for (std::size_t i = 0; i < n && !out.subgrad_warning; ++i) {
    const double h = 1e-3 * (1.0 + std::fabs(s[i]));
    z[i] = s[i] + h;
    if (violates(z)) out.subgrad_warning = true;
    z[i] = s[i] - h;
    if (violates(z)) out.subgrad_warning = true;
    z[i] = s[i];
  }
  if (out.subgrad_warning)
    std::fprintf(stderr,
                 "lcbayes: generalized_dual: supplied q is not a subgradient of %s at s\n",
                 phi.name().c_str());

  std::vector<double> d(n);
  kern::sub(x.data(), s.data(), d.data(), n);
  const double px = phi.value(x);
  out.value =
      clip_roundoff(px - ps - kern::dot(q.data(), d.data(), n), std::fabs(px) + std::fabs(ps));
  return out;
}

namespace {

double canonical_quad(const Potential& phi, std::span<const double> u,
                      std::span<const double> x, int order) {
  const std::size_t n = phi.dim();
  const auto& rule = gauss_legendre(order);
  std::vector<double> d(n), p(n), hd(n);
  kern::sub(x.data(), u.data(), d.data(), n);
  double acc = 0.0;
  for (int k = 0; k < order; ++k) {
    const double t = rule.nodes[k];
    kern::axpy(t, d.data(), u.data(), p.data(), n);
    phi.hessian_vec(p, d, hd);
    acc += rule.weights[k] * t * kern::dot(d.data(), hd.data(), n);
  }
  return acc;
}

}  // namespace

DivergenceValue canonical_numeric(const Potential& phi, std::span<const double> u,
                                  std::span<const double> x, int quad_order) {
  if (!phi.has_hessian())
    throw UnsupportedOperation("canonical_numeric: " + phi.name() + " has no Hessian oracle");
  require_in_domain(phi, u, "canonical_numeric");
  require_in_domain(phi, x, "canonical_numeric");
  DivergenceValue out;
  out.form = DivForm::canonical_numeric;
  out.value = canonical_quad(phi, u, x, quad_order);
  const double refined = canonical_quad(phi, u, x, 2 * quad_order);
  out.refine_residual = std::fabs(out.value - refined) / (1.0 + std::fabs(refined));
  return out;
}

namespace {

// 1-D conjugate solve: root of phi'(x) = eta by bracket expansion + hybrid
// Newton/bisection. Throws ConvergenceError on runaway (phi* infinite).
double legendre_root_1d(const Potential& phi, double eta, const SolveBudget& budget) {
  auto dphi = [&](double v) {
    double g;
    std::span<const double> xs(&v, 1);
    std::span<double> gs(&g, 1);
    phi.grad(xs, gs);
    return g - eta;
  };
  double lo = 0.0, hi = 0.0, step = 1.0;
  double r0 = dphi(0.0);
  if (r0 == 0.0) return 0.0;
  if (r0 > 0.0) {
    lo = -1.0;
    while (dphi(lo) > 0.0) {
      lo *= 2.0;
      if (lo < -1e12)
        throw ConvergenceError("legendre: maximizer runaway (phi* likely infinite)",
                               std::fabs(dphi(lo)));
    }
    hi = lo < -1.0 ? lo / 2.0 : 0.0;
  } else {
    hi = 1.0;
    while (dphi(hi) < 0.0) {
      hi *= 2.0;
      if (hi > 1e12)
        throw ConvergenceError("legendre: maximizer runaway (phi* likely infinite)",
                               std::fabs(dphi(hi)));
    }
    lo = hi > 1.0 ? hi / 2.0 : 0.0;
  }
  if (dphi(lo) > 0.0) lo = std::min(lo * 2.0, lo - step);
  double v = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double rv = dphi(v);
    if (std::fabs(rv) <= budget.tol * (1.0 + std::fabs(eta))) return v;
    if (rv > 0.0)
      hi = v;
    else
      lo = v;
    double vn = 0.5 * (lo + hi);
    if (phi.has_hessian()) {
      double h, one = 1.0;
      std::span<const double> xs(&v, 1), os(&one, 1);
      std::span<double> hs(&h, 1);
      phi.hessian_vec(xs, os, hs);
      if (h > 0.0) {
        const double cand = v - rv / h;
        if (cand > lo && cand < hi) vn = cand;
      }
    }
    v = vn;
  }
  throw ConvergenceError("legendre: 1-D solve exhausted its budget", std::fabs(dphi(v)));
}

}  // namespace

DualPoint legendre(const Potential& phi, std::span<const double> eta, SolveBudget budget) {
  if (!phi.domain().is_all())
    throw UnsupportedOperation("legendre: conjugates of constrained potentials not supported");
  const std::size_t n = phi.dim();
  if (eta.size() != n) throw std::invalid_argument("legendre: eta dimension mismatch");

  DualPoint out;
  out.eta.assign(eta.begin(), eta.end());
  out.x.assign(n, 0.0);

  if (n == 1) {
    out.x[0] = legendre_root_1d(phi, eta[0], budget);
  } else {
    // damped Newton on psi(x) = phi(x) - x'eta
    std::vector<double> g(n), r(n), d(n), xn(n);
    auto psi = [&](std::span<const double> p) {
      return phi.value(p) - kern::dot(p.data(), eta.data(), n);
    };
    double fx = psi(out.x);
    for (int it = 0;; ++it) {
      phi.grad(out.x, g);
      kern::sub(g.data(), eta.data(), r.data(), n);  // r = grad psi
      const double rn = std::sqrt(kern::reduce_sq(r.data(), n));
      if (rn <= budget.tol * (1.0 + std::sqrt(kern::reduce_sq(eta.data(), n))))
        break;
      if (it >= budget.max_iter)
        throw ConvergenceError("legendre: Newton exhausted its budget", rn);

      Mat h = metric(phi, out.x);
      double shift = 0.0;
      Mat fac = h;
      while (!cholesky(fac)) {
        shift = shift == 0.0 ? 1e-10 : shift * 100.0;
        fac = h;
        for (std::size_t i = 0; i < n; ++i) fac(i, i) += shift;
        if (shift > 1e6)
          throw ConvergenceError("legendre: Hessian not positive definite", rn);
      }
      chol_solve(fac, r, d);
      // backtracking on psi along -d
      double t = 1.0;
      const double slope = -kern::dot(r.data(), d.data(), n);
      for (int ls = 0; ls < 60; ++ls) {
        kern::axpy(-t, d.data(), out.x.data(), xn.data(), n);
        const double fn = psi(xn);
        if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) break;
        t *= 0.5;
      }
      kern::axpy(-t, d.data(), out.x.data(), xn.data(), n);
      out.x = xn;
      fx = psi(out.x);
      if (!std::isfinite(fx) || std::sqrt(kern::reduce_sq(out.x.data(), n)) > 1e12)
        throw ConvergenceError("legendre: maximizer runaway (phi* likely infinite)", rn);
    }
  }
  out.conj_value = kern::dot(out.x.data(), eta.data(), n) - phi.value(out.x);
  return out;
}

Mat metric(const Potential& phi, std::span<const double> x) {
  const std::size_t n = phi.dim();
  Mat h(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    phi.hessian_vec(x, e, col);
    for (std::size_t i = 0; i < n; ++i) h(i, j) = col[i];
    e[j] = 0.0;
  }
  // symmetrize against oracle asymmetry at rounding level
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (h(i, j) + h(j, i));
      h(i, j) = h(j, i) = s;
    }
  return h;
}

double dual_metric_check(const Potential& phi, std::span<const double> x, double fd_step) {
  const std::size_t n = phi.dim();
  std::vector<double> eta(n);
  phi.grad(x, eta);
  const double h =
      fd_step > 0.0 ? fd_step : 1e-4 * (1.0 + std::sqrt(kern::reduce_sq(eta.data(), n)));

  // g*(eta) columns: d x_eta / d eta_j by central differences
  Mat gstar(n, n);
  std::vector<double> ep(eta.begin(), eta.end());
  for (std::size_t j = 0; j < n; ++j) {
    ep[j] = eta[j] + h;
    const auto xp = legendre(phi, ep);
    ep[j] = eta[j] - h;
    const auto xm = legendre(phi, ep);
    ep[j] = eta[j];
    for (std::size_t i = 0; i < n; ++i) gstar(i, j) = (xp.x[i] - xm.x[i]) / (2.0 * h);
  }
  const Mat g = metric(phi, x);
  const Mat prod = matmul(gstar, g);
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      resid = std::max(resid, std::fabs(prod(i, j) - (i == j ? 1.0 : 0.0)));
  return resid;
}

double biconjugate(const Potential& phi, std::span<const double> x, SolveBudget budget) {
  const std::size_t n = phi.dim();
  // maximize h(eta) = x'eta - phi*(eta); grad h = x - x_eta; Newton direction
  // g(x_eta)(x - x_eta) with a gradient fallback when the metric is singular.
  std::vector<double> eta(n, 0.0), dir(n), etan(n), gd(n);
  auto neg_h = [&](std::span<const double> e) -> std::pair<double, DualPoint> {
    DualPoint dp = legendre(phi, e, budget);
    return {dp.conj_value - kern::dot(x.data(), e.data(), n), std::move(dp)};
  };
  auto [f, dp] = neg_h(eta);
  for (int it = 0; it < budget.max_iter; ++it) {
    kern::sub(x.data(), dp.x.data(), gd.data(), n);  // ascent gradient
    const double gn = std::sqrt(kern::reduce_sq(gd.data(), n));
    if (gn <= budget.tol * 100.0 * (1.0 + std::sqrt(kern::reduce_sq(x.data(), n)))) break;
    bool have_newton = false;
    if (phi.has_hessian()) {
      const Mat g = metric(phi, dp.x);
      matvec(g, gd, dir);
      const double dn = std::sqrt(kern::reduce_sq(dir.data(), n));
      if (dn > 1e-14 * gn) have_newton = true;
    }
    if (!have_newton) std::copy(gd.begin(), gd.end(), dir.begin());
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 80; ++ls) {
      kern::axpy(t, dir.data(), eta.data(), etan.data(), n);
      try {
        auto [fn, dpn] = neg_h(etan);
        const double decrease = -1e-4 * t * kern::dot(gd.data(), dir.data(), n);
        if (fn <= f + decrease) {
          eta = etan;
          f = fn;
          dp = std::move(dpn);
          moved = true;
          break;
        }
      } catch (const ConvergenceError&) {
        // phi* effectively infinite in this direction; shrink
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return kern::dot(x.data(), eta.data(), n) - dp.conj_value;
}

}  // namespace lcb::geometry
