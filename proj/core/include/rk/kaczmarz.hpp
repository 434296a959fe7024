#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rk/linalg.hpp"
#include "rk/random.hpp"

namespace rk {

/// Draws row i with probability ||a_i||^2 / ||A||_F^2 by binary search of a
/// uniform draw against the running totals of squared row norms.
class RowSampler {
 public:
  /// Throws ZeroRowError naming the first zero row.
  explicit RowSampler(const DenseMatrix& a);

  std::size_t size() const noexcept { return cumulative_.size(); }
  double total() const noexcept { return cumulative_.back(); }
  std::span<const double> cumulative() const noexcept { return cumulative_; }
  double probability(std::size_t i) const;

  /// Row whose bracket contains u * total, i.e. the first i with
  /// cumulative[i] > u * total. u must lie in [0, 1).
  std::size_t pick(double u) const;

  std::size_t sample(Rng& rng) const { return pick(rng.uniform()); }

 private:
  std::vector<double> cumulative_;
};

inline RowSampler build_sampler(const DenseMatrix& a) { return RowSampler(a); }

/// x' = x + (b_i - <a_i, x>) / ||a_i||^2 * a_i: the orthogonal projection of x
/// onto the hyperplane <a_i, x> = b_i. Throws ZeroRowError when a_i = 0.
Vector project_step(const DenseMatrix& a, std::span<const double> b,
                    std::span<const double> x, std::size_t i);

/// In-place form of project_step with the squared row norm precomputed.
inline void project_in_place(std::span<const double> row, double rhs,
                             double row_norm_sq, std::span<double> x) {
  double inner = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) inner += row[j] * x[j];
  const double scale = (rhs - inner) / row_norm_sq;
  for (std::size_t j = 0; j < row.size(); ++j) x[j] += scale * row[j];
}

struct SolveConfig {
  std::uint64_t seed = 0;
  std::size_t max_iters = 1000;
  double residual_tol = 0.0;
  std::size_t trace_every = 10;
  bool track_coefficients = false;

  /// Throws DomainError for max_iters == 0, trace_every == 0 or a negative or
  /// non-finite tolerance.
  void validate() const;
};

/// Randomized Kaczmarz driver: owns the sampler and RNG, borrows the matrix.
/// Two steppers built from the same (matrix, seed) pick identical rows.
class KaczmarzStepper {
 public:
  KaczmarzStepper(const DenseMatrix& a, std::uint64_t seed);

  /// One projection on a sampled row. Returns the row index (zero-based).
  std::size_t step(std::span<double> x, std::span<const double> b);

  /// Same, for the homogeneous system Ax = 0.
  std::size_t step_homogeneous(std::span<double> x);

  const RowSampler& sampler() const noexcept { return sampler_; }

 private:
  const DenseMatrix* a_;
  RowSampler sampler_;
  Vector row_norms_sq_;
  Rng rng_;
};

struct TraceEntry {
  std::size_t iter = 0;
  std::optional<std::size_t> row;  // zero-based; empty for the initial iterate
  double residual = 0.0;           // ||A x_k - b||
  double error = 0.0;              // ||x_k - x||, NaN without a reference solution
  double rayleigh = 0.0;           // ||A x_k|| / ||x_k|| when b = 0, else NaN
  Vector coefficients;             // <x_k - x, v_l>, l = 1..n, when tracked
  double overlap = 0.0;            // |<x_k / ||x_k||, v_n>| when b = 0 and an SVD is given, else NaN
};

struct IterateTrace {
  std::vector<TraceEntry> entries;
  Vector final_x;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  double final_error = 0.0;
  bool converged = false;
};

/// Runs randomized Kaczmarz from x0 until the residual, checked at every
/// logged step k >= 1, drops to cfg.residual_tol or cfg.max_iters steps are
/// taken. Logs k = 0 and every cfg.trace_every steps.
///
/// When `true_x` is given the system must be consistent
/// (||A true_x - b|| <= 1e-10 ||b||) and errors are logged. Singular
/// coefficients are logged when cfg.track_coefficients is set, which requires
/// both `true_x` and `svd`.
IterateTrace solve(const DenseMatrix& a, std::span<const double> b,
                   std::span<const double> x0, const SolveConfig& cfg,
                   std::optional<std::span<const double>> true_x = std::nullopt,
                   const SvdFactorization* svd = nullptr);

/// CSV with header iter,row,residual,error,rayleigh[,coef_1,...,coef_n].
/// Rows are written one-based; the initial iterate has row 0. Scalars use 17
/// significant digits and NaN is written as "nan".
void write_trace_csv(std::ostream& out, const IterateTrace& trace);

}  // namespace rk
