#include "rk/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "rk/errors.hpp"

namespace rk {

namespace {

void require_positive(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix dimensions must be positive, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

// Rotates the column pair (x, y) in place: x <- c x - s y, y <- s x + c y.
void rotate(std::vector<double>& x, std::vector<double>& y, double c, double s) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = x[k];
    const double yk = y[k];
    x[k] = c * xk - s * yk;
    y[k] = s * xk + c * yk;
  }
}

// Gram-Schmidt (two passes) of candidate basis vectors against `basis`;
// returns the first candidate that keeps a substantial component.
std::vector<double> orthonormal_complement(
    const std::vector<std::vector<double>>& basis, std::size_t len) {
  for (std::size_t e = 0; e < len; ++e) {
    std::vector<double> w(len, 0.0);
    w[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double proj = dot(w, b);
        for (std::size_t k = 0; k < len; ++k) w[k] -= proj * b[k];
      }
    }
    const double nrm = norm2(w);
    if (nrm > 0.5) {
      for (double& wk : w) wk /= nrm;
      return w;
    }
  }
  // Unreachable while basis.size() < len.
  return std::vector<double>(len, 0.0);
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  require_positive(rows, cols);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require_positive(rows, cols);
  if (data_.size() != rows * cols) {
    throw DimensionError("expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(data_.size()));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw DomainError("non-finite matrix entry at (" +
                        std::to_string(k / cols + 1) + ", " +
                        std::to_string(k % cols + 1) + ")");
    }
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
  return id;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm_sq(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

double frobenius_norm_sq(const DenseMatrix& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) total += norm_sq(a.row(i));
  return total;
}

Vector row_norms_sq(const DenseMatrix& a) {
  Vector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) r[i] = norm_sq(a.row(i));
  return r;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) {
    throw DimensionError("matvec: expected vector of length " +
                         std::to_string(a.cols()) + ", got " +
                         std::to_string(x.size()));
  }
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector matvec_transposed(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) {
    throw DimensionError("matvec_transposed: expected vector of length " +
                         std::to_string(a.rows()) + ", got " +
                         std::to_string(x.size()));
  }
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += x[i] * r[j];
  }
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions " + std::to_string(a.cols()) +
                         " and " + std::to_string(b.rows()));
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

SvdFactorization svd(const DenseMatrix& a, const SvdOptions& opts) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    throw DimensionError("svd requires rows >= cols, got " + std::to_string(m) +
                         "x" + std::to_string(n));
  }
  // Relative orthogonality below ~m*eps is roundoff; never ask for better.
  const double tol = std::max(opts.tol, static_cast<double>(m) * DBL_EPSILON);
  // Columns that have collapsed to roundoff (rank deficiency) have no
  // meaningful direction; leave them alone.
  const double floor_norm = static_cast<double>(m) * DBL_EPSILON * std::sqrt(frobenius_norm_sq(a));
  const double negligible = floor_norm * floor_norm;

  std::vector<std::vector<double>> g(n, std::vector<double>(m));
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = a.column(j);
    v[j][j] = 1.0;
  }

  int sweep = 0;
  bool converged = false;
  while (!converged) {
    if (sweep == opts.max_sweeps) throw ConvergenceError(sweep);
    ++sweep;
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = norm_sq(g[p]);
        const double beta = norm_sq(g[q]);
        if (alpha <= negligible || beta <= negligible) continue;
        const double gamma = dot(g[p], g[q]);
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(g[p], g[q], c, s);
        rotate(v[p], v[q], c, s);
      }
    }
  }

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    norms[j] = norm2(g[j]);
    if (norms[j] <= floor_norm) norms[j] = 0.0;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SvdFactorization f{DenseMatrix(m, n), Vector(n), DenseMatrix(n, n), sweep};
  std::vector<std::vector<double>> ucols;
  ucols.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    f.sigma[k] = norms[j];
    std::vector<double> vcol = v[j];
    std::vector<double> ucol;
    if (norms[j] > 0.0) {
      ucol = g[j];
      for (double& x : ucol) x /= norms[j];
    } else {
      ucol = orthonormal_complement(ucols, m);
    }
    std::size_t big = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(vcol[r]) > std::abs(vcol[big])) big = r;
    if (vcol[big] < 0.0) {
      for (double& x : vcol) x = -x;
      for (double& x : ucol) x = -x;
    }
    for (std::size_t r = 0; r < m; ++r) f.u(r, k) = ucol[r];
    for (std::size_t r = 0; r < n; ++r) f.v(r, k) = vcol[r];
    ucols.push_back(std::move(ucol));
  }
  return f;
}

bool has_full_column_rank(const SvdFactorization& f, double rank_tol) {
  return f.smallest() > rank_tol * f.largest();
}

double rayleigh_quotient(const DenseMatrix& a, std::span<const double> x) {
  const double nx = norm2(x);
  if (nx == 0.0) throw DomainError("rayleigh_quotient: zero vector");
  return norm2(matvec(a, x)) / nx;
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  Vector r(y.begin(), y.end());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += alpha * x[k];
  return r;
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  return axpy(-1.0, y, x);
}

}  // namespace rk
