#pragma once

#include <cmath>

namespace lcb {

inline double norm_pdf(double z) {
  return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

// Standard normal quantile: Acklam's rational approximation polished with two
// Newton steps against erfc, good to ~1 ulp away from the extreme tails.
double norm_quantile(double p);

}  // namespace lcb
