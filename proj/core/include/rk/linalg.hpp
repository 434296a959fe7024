#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rk {

using Vector = std::vector<double>;

// Row-major m x n matrix of doubles. Entries are finite and both dimensions
// are positive; the constructors enforce this.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);  // zero-filled
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const;
  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transposed() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Thin SVD A = U diag(sigma) V^T for m >= n. Columns of `u` (m x n) and `v`
/// (n x n) are the left and right singular vectors; sigma is descending.
/// Sign convention: the largest-magnitude entry of every column of v is
/// positive (ties go to the lowest index).
struct SvdFactorization {
  DenseMatrix u;
  Vector sigma;
  DenseMatrix v;
  int sweeps = 0;

  std::size_t rank_size() const noexcept { return sigma.size(); }
  Vector right_vector(std::size_t l) const { return v.column(l); }
  Vector left_vector(std::size_t l) const { return u.column(l); }
  double smallest() const noexcept { return sigma.back(); }
  double largest() const noexcept { return sigma.front(); }
};

struct SvdOptions {
  // A pair of columns is rotated while |<g_p,g_q>| > tol * |g_p| |g_q|.
  double tol = 1e-15;
  int max_sweeps = 60;
};

// sigma_n > rank_tol * sigma_1 counts as full column rank.
inline constexpr double kRankTolerance = 1e-12;

double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> a);
double norm2(std::span<const double> a);

/// Sum of squared entries, accumulated row by row. Bit-identical to the
/// running total of row norms used by the row sampler.
double frobenius_norm_sq(const DenseMatrix& a);

Vector row_norms_sq(const DenseMatrix& a);

// Throws DimensionError when x.size() != a.cols().
Vector matvec(const DenseMatrix& a, std::span<const double> x);

// Throws DimensionError when x.size() != a.rows().
Vector matvec_transposed(const DenseMatrix& a, std::span<const double> x);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// One-sided (Hestenes) Jacobi SVD. Requires rows >= cols. Columns whose norm
/// falls to m * eps * ||A||_F get sigma = 0 and a completed left vector.
/// Throws ConvergenceError after `max_sweeps` sweeps without convergence.
SvdFactorization svd(const DenseMatrix& a, const SvdOptions& opts = {});

bool has_full_column_rank(const SvdFactorization& f,
                          double rank_tol = kRankTolerance);

/// ||A x|| / ||x||. Throws DomainError for x = 0.
double rayleigh_quotient(const DenseMatrix& a, std::span<const double> x);

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);

}  // namespace rk
