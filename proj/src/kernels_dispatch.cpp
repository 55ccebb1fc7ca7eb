#include <atomic>

#include "lcbayes/kernels.hpp"

namespace lcb::kern {
namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(LCB_HAVE_AVX2_LANE) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<bool> g_use_avx2{cpu_has_avx2_fma()};

}  // namespace

void set_lane(Lane lane) {
  switch (lane) {
    case Lane::autodetect:
      g_use_avx2.store(cpu_has_avx2_fma(), std::memory_order_relaxed);
      break;
    case Lane::scalar:
      g_use_avx2.store(false, std::memory_order_relaxed);
      break;
    case Lane::avx2:
      g_use_avx2.store(cpu_has_avx2_fma(), std::memory_order_relaxed);
      break;
  }
}

std::string_view active_lane() noexcept {
  return g_use_avx2.load(std::memory_order_relaxed) ? "avx2" : "scalar";
}

#if defined(LCB_HAVE_AVX2_LANE)
#define LCB_DISPATCH(call) \
  return g_use_avx2.load(std::memory_order_relaxed) ? avx2::call : scalar::call
#define LCB_DISPATCH_VOID(call)                        \
  if (g_use_avx2.load(std::memory_order_relaxed)) {    \
    avx2::call;                                        \
  } else {                                             \
    scalar::call;                                      \
  }
#else
#define LCB_DISPATCH(call) return scalar::call
#define LCB_DISPATCH_VOID(call) scalar::call
#endif

double reduce_add(const double* x, std::size_t n) noexcept { LCB_DISPATCH(reduce_add(x, n)); }
double reduce_abs(const double* x, std::size_t n) noexcept { LCB_DISPATCH(reduce_abs(x, n)); }
double reduce_sq(const double* x, std::size_t n) noexcept { LCB_DISPATCH(reduce_sq(x, n)); }
double reduce_quart(const double* x, std::size_t n) noexcept { LCB_DISPATCH(reduce_quart(x, n)); }
double dot(const double* x, const double* y, std::size_t n) noexcept { LCB_DISPATCH(dot(x, y, n)); }
double reduce_sqdev(const double* x, const double* mu, std::size_t n) noexcept {
  LCB_DISPATCH(reduce_sqdev(x, mu, n));
}
double reduce_wsqdev(const double* x, const double* mu, const double* w,
                     std::size_t n) noexcept {
  LCB_DISPATCH(reduce_wsqdev(x, mu, w, n));
}
void axpy(double a, const double* x, const double* y, double* out, std::size_t n) noexcept {
  LCB_DISPATCH_VOID(axpy(a, x, y, out, n));
}
void scale(double a, const double* x, double* out, std::size_t n) noexcept {
  LCB_DISPATCH_VOID(scale(a, x, out, n));
}
void sub(const double* x, const double* y, double* out, std::size_t n) noexcept {
  LCB_DISPATCH_VOID(sub(x, y, out, n));
}
void soft_threshold(const double* x, double tau, double* out, std::size_t n) noexcept {
  LCB_DISPATCH_VOID(soft_threshold(x, tau, out, n));
}
void clamp(const double* x, const double* lo, const double* hi, double* out,
           std::size_t n) noexcept {
  LCB_DISPATCH_VOID(clamp(x, lo, hi, out, n));
}

#undef LCB_DISPATCH
#undef LCB_DISPATCH_VOID

}  // namespace lcb::kern
