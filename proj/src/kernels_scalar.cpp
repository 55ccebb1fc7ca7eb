#include <algorithm>
#include <cmath>

#include "lcbayes/kernels.hpp"

// Reference lane. Plain loops, no reassociation tricks: this is the
// semantics the SIMD variants are equivalence-tested against.

namespace lcb::kern::scalar {

double reduce_add(const double* x, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double reduce_abs(const double* x, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double reduce_sq(const double* x, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double reduce_quart(const double* x, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = x[i] * x[i];
    s += q * q;
  }
  return s;
}

double dot(const double* x, const double* y, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double reduce_sqdev(const double* x, const double* mu, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mu[i];
    s += d * d;
  }
  return s;
}

double reduce_wsqdev(const double* x, const double* mu, const double* w,
                     std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mu[i];
    s += w[i] * d * d;
  }
  return s;
}

void axpy(double a, const double* x, const double* y, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + y[i];
}

void scale(double a, const double* x, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void sub(const double* x, const double* y, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void soft_threshold(const double* x, double tau, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::fabs(x[i]) - tau;
    out[i] = m > 0.0 ? std::copysign(m, x[i]) : 0.0;
  }
}

void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

}  // namespace lcb::kern::scalar
