#include "lcbayes/linalg.hpp"

#include <cassert>
#include <cmath>

#include "lcbayes/kernels.hpp"

namespace lcb {

void matvec(const Mat& m, std::span<const double> x, std::span<double> out) {
  assert(x.size() == m.cols() && out.size() == m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    out[i] = kern::dot(m.data() + i * m.cols(), x.data(), m.cols());
}

void matvec_t(const Mat& m, std::span<const double> x, std::span<double> out) {
  assert(x.size() == m.rows() && out.size() == m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    kern::axpy(x[i], m.data() + i * m.cols(), out.data(), out.data(), m.cols());
}

Mat matmul(const Mat& a, const Mat& b) {
  assert(a.cols() == b.rows());
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      kern::axpy(a(i, k), b.data() + k * b.cols(), c.data() + i * c.cols(),
                 c.data() + i * c.cols(), b.cols());
  return c;
}

Mat transpose(const Mat& m) {
  Mat t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

Mat gram(const Mat& a) {
  Mat g(a.cols(), a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
      g(i, j) = g(j, i) = s;
    }
  return g;
}

bool cholesky(Mat& m) {
  assert(m.rows() == m.cols());
  const std::size_t n = m.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j) - kern::dot(m.data() + j * n, m.data() + j * n, j);
    if (d <= 0.0 || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    m(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      const double s = m(i, j) - kern::dot(m.data() + i * n, m.data() + j * n, j);
      m(i, j) = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = 0.0;
  return true;
}

void solve_lower(const Mat& chol, std::span<const double> b, std::span<double> y) {
  const std::size_t n = chol.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i] - kern::dot(chol.data() + i * n, y.data(), i);
    y[i] = s / chol(i, i);
  }
}

void solve_lower_t(const Mat& chol, std::span<const double> b, std::span<double> x) {
  const std::size_t n = chol.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= chol(k, ii) * x[k];
    x[ii] = s / chol(ii, ii);
  }
}

void chol_solve(const Mat& chol, std::span<const double> b, std::span<double> x) {
  std::vector<double> y(chol.rows());
  solve_lower(chol, b, y);
  solve_lower_t(chol, y, x);
}

double eig_max_spd(const Mat& m, int iters) {
  const std::size_t n = m.rows();
  std::vector<double> v(n, 1.0), w(n);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    matvec(m, v, w);
    lambda = std::sqrt(kern::reduce_sq(w.data(), n));
    if (lambda == 0.0) return 0.0;
    kern::scale(1.0 / lambda, w.data(), v.data(), n);
  }
  return lambda;
}

double eig_min_spd(const Mat& m, int iters) {
  Mat chol = m;
  if (!cholesky(chol)) return 0.0;
  const std::size_t n = m.rows();
  std::vector<double> v(n, 1.0), w(n);
  double nrm = 1.0 / std::sqrt(static_cast<double>(n));
  kern::scale(nrm, v.data(), v.data(), n);
  double mu = 0.0;
  for (int it = 0; it < iters; ++it) {
    chol_solve(chol, v, w);
    mu = std::sqrt(kern::reduce_sq(w.data(), n));
    if (mu == 0.0) return 0.0;
    kern::scale(1.0 / mu, w.data(), v.data(), n);
  }
  return 1.0 / mu;
}

}  // namespace lcb
