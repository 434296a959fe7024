#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rk {

// Shapes of operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad scalar argument (non-finite entry, zero vector, sigma above Frobenius mass, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A zero row of A defines no hyperplane. `row()` is zero-based.
class ZeroRowError : public std::runtime_error {
 public:
  explicit ZeroRowError(std::size_t row)
      : std::runtime_error("row " + std::to_string(row + 1) +
                           " of the matrix is zero"),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Matrix is numerically rank deficient where full column rank is required.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One-sided Jacobi did not reach the off-diagonal threshold.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(int sweeps)
      : std::runtime_error("SVD did not converge after " +
                           std::to_string(sweeps) + " sweeps"),
        sweeps_(sweeps) {}
  int sweeps() const noexcept { return sweeps_; }

 private:
  int sweeps_;
};

// Projection onto row `row()` sends the probe to zero, so the normalized
// next iterate is undefined with positive probability.
class HypothesisError : public std::runtime_error {
 public:
  explicit HypothesisError(std::size_t row)
      : std::runtime_error("projection onto row " + std::to_string(row + 1) +
                           " annihilates the probe vector (P(x_{k+1} = x) > 0)"),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace rk
