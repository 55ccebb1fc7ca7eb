#include "lcbayes/potential.hpp"

#include <cmath>

#include "lcbayes/kernels.hpp"

namespace lcb {

void Domain::project(std::span<const double> x, std::span<double> out) const {
  if (kind_ == Kind::all) {
    std::copy(x.begin(), x.end(), out.begin());
    return;
  }
  kern::clamp(x.data(), lo_.data(), hi_.data(), out.data(), x.size());
}

double Potential::prox_newton_1d(double u, double gamma,
                                 double (*dpsi)(double, const void*),
                                 double (*d2psi)(double, const void*), const void* ctx,
                                 double tol) {
  // root of r(v) = gamma*dpsi(v) + v - u; r is strictly increasing.
  auto r = [&](double v) { return gamma * dpsi(v, ctx) + v - u; };
  double lo = u, hi = u;
  double step = 1.0 + std::fabs(u);
  double rlo = r(lo);
  if (rlo > 0.0) {
    while (rlo > 0.0) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      rlo = r(lo);
    }
  } else {
    double rhi = r(hi);
    while (rhi < 0.0) {
      lo = hi;
      hi += step;
      step *= 2.0;
      rhi = r(hi);
    }
  }
  double v = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double rv = r(v);
    if (std::fabs(rv) <= tol) return v;
    if (rv > 0.0)
      hi = v;
    else
      lo = v;
    const double drv = gamma * d2psi(v, ctx) + 1.0;
    double vn = v - rv / drv;
    if (!(vn > lo) || !(vn < hi)) vn = 0.5 * (lo + hi);  // Newton left the bracket
    v = vn;
  }
  return v;
}

}  // namespace lcb
