#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Vector kernels behind the hot loops: potential evaluations over sample
// batches, Langevin chain updates, streaming Monte Carlo reductions.
// Each kernel has a scalar reference implementation and (on x86-64) an
// AVX2+FMA variant; the active lane is chosen once at runtime from cpuid.
// Reductions accumulate in lane order, so the two lanes may differ by a few
// ULPs; elementwise kernels agree exactly unless FMA contraction applies.

namespace lcb::kern {

enum class Lane { autodetect, scalar, avx2 };

// Overrides lane selection (tests use this to compare variants).
// Requesting avx2 on a machine without it falls back to scalar.
void set_lane(Lane lane);
std::string_view active_lane() noexcept;

double reduce_add(const double* x, std::size_t n) noexcept;
double reduce_abs(const double* x, std::size_t n) noexcept;
double reduce_sq(const double* x, std::size_t n) noexcept;
double reduce_quart(const double* x, std::size_t n) noexcept;
double dot(const double* x, const double* y, std::size_t n) noexcept;
// sum_i (x_i - mu_i)^2
double reduce_sqdev(const double* x, const double* mu, std::size_t n) noexcept;
// sum_i w_i (x_i - mu_i)^2
double reduce_wsqdev(const double* x, const double* mu, const double* w,
                     std::size_t n) noexcept;

// out = a*x + y
void axpy(double a, const double* x, const double* y, double* out, std::size_t n) noexcept;
// out = a*x
void scale(double a, const double* x, double* out, std::size_t n) noexcept;
// out = x - y
void sub(const double* x, const double* y, double* out, std::size_t n) noexcept;
// out_i = sign(x_i) * max(|x_i| - tau, 0)
void soft_threshold(const double* x, double tau, double* out, std::size_t n) noexcept;
// out_i = min(max(x_i, lo_i), hi_i); bounds may be +-inf
void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) noexcept;

// span conveniences
inline double reduce_add(std::span<const double> x) noexcept { return reduce_add(x.data(), x.size()); }
inline double reduce_abs(std::span<const double> x) noexcept { return reduce_abs(x.data(), x.size()); }
inline double reduce_sq(std::span<const double> x) noexcept { return reduce_sq(x.data(), x.size()); }
inline double reduce_quart(std::span<const double> x) noexcept { return reduce_quart(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) noexcept {
  return dot(x.data(), y.data(), x.size());
}

namespace scalar {
double reduce_add(const double* x, std::size_t n) noexcept;
double reduce_abs(const double* x, std::size_t n) noexcept;
double reduce_sq(const double* x, std::size_t n) noexcept;
double reduce_quart(const double* x, std::size_t n) noexcept;
double dot(const double* x, const double* y, std::size_t n) noexcept;
double reduce_sqdev(const double* x, const double* mu, std::size_t n) noexcept;
double reduce_wsqdev(const double* x, const double* mu, const double* w,
                     std::size_t n) noexcept;
void axpy(double a, const double* x, const double* y, double* out, std::size_t n) noexcept;
void scale(double a, const double* x, double* out, std::size_t n) noexcept;
void sub(const double* x, const double* y, double* out, std::size_t n) noexcept;
void soft_threshold(const double* x, double tau, double* out, std::size_t n) noexcept;
void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define LCB_HAVE_AVX2_LANE 1
namespace avx2 {
double reduce_add(const double* x, std::size_t n) noexcept;
double reduce_abs(const double* x, std::size_t n) noexcept;
double reduce_sq(const double* x, std::size_t n) noexcept;
double reduce_quart(const double* x, std::size_t n) noexcept;
double dot(const double* x, const double* y, std::size_t n) noexcept;
double reduce_sqdev(const double* x, const double* mu, std::size_t n) noexcept;
double reduce_wsqdev(const double* x, const double* mu, const double* w,
                     std::size_t n) noexcept;
void axpy(double a, const double* x, const double* y, double* out, std::size_t n) noexcept;
void scale(double a, const double* x, double* out, std::size_t n) noexcept;
void sub(const double* x, const double* y, double* out, std::size_t n) noexcept;
void soft_threshold(const double* x, double tau, double* out, std::size_t n) noexcept;
void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) noexcept;
}  // namespace avx2
#endif

}  // namespace lcb::kern
