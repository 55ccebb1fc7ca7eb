#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Small dense helpers for the zoo-scale problems (n up to a few hundred):
// row-major matrix, Cholesky, triangular solves, extreme eigenvalues.

namespace lcb {

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * cols_ + j]; }
  double* data() noexcept { return a_.data(); }
  const double* data() const noexcept { return a_.data(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {a_.data() + i * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

void matvec(const Mat& m, std::span<const double> x, std::span<double> out);
// out = m^T x
void matvec_t(const Mat& m, std::span<const double> x, std::span<double> out);
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& m);
// a^T a for a general rectangular a
Mat gram(const Mat& a);

// In-place lower Cholesky of a symmetric positive definite matrix.
// Returns false if a non-positive pivot is met.
bool cholesky(Mat& m);
// Solves L y = b given the lower factor.
void solve_lower(const Mat& chol, std::span<const double> b, std::span<double> y);
// Solves L^T x = b given the lower factor.
void solve_lower_t(const Mat& chol, std::span<const double> b, std::span<double> x);
// Solves (L L^T) x = b.
void chol_solve(const Mat& chol, std::span<const double> b, std::span<double> x);

// Extreme eigenvalues of a symmetric positive definite matrix by power /
// inverse-power iteration. Adequate for conditioning constants.
double eig_max_spd(const Mat& m, int iters = 200);
double eig_min_spd(const Mat& m, int iters = 200);

}  // namespace lcb
