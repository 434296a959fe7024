#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rk/kaczmarz.hpp"
#include "rk/linalg.hpp"

namespace rk {

// Exact one-step expectations over the row choice, written for the
// homogeneous system A y = 0 (y plays the role of x_k - x). Each oracle
// enumerates all m outcomes with weights ||a_i||^2 / ||A||_F^2.

/// (<e, v_1>, ..., <e, v_n>).
Vector singular_coefficients(const SvdFactorization& f, std::span<const double> e);

/// (1 - sigma_l^2 / frob_sq)^k * c0. Throws DomainError unless
/// 0 <= sigma_l^2 <= frob_sq (up to relative roundoff 1e-12) and frob_sq > 0.
double predicted_coefficient(double sigma_l, double frob_sq, std::size_t k, double c0);

/// E <y', v_l> for one projection step from y.
double theorem1_one_step_oracle(const DenseMatrix& a, const SvdFactorization& f,
                                std::span<const double> y, std::size_t l);

/// 1 - ||A y||^2 / (||A||_F^2 ||y||^2). Throws DomainError for y = 0.
double contraction_factor(const DenseMatrix& a, std::span<const double> y);

/// E ||y'||^2 for one projection step from y. For a consistent system this is
/// exactly contraction_factor(a, y) * ||y||^2 (each projection is orthogonal).
double theorem2_one_step_oracle(const DenseMatrix& a, std::span<const double> y);

/// E <y/|y|, y'/|y'|>^2 for one projection step from y != 0. Throws
/// HypothesisError if some row projects y to zero (the normalized outcome is
/// undefined), naming that row. The threshold is ||y'|| <= 1e-13 ||y||.
double theorem3_one_step_oracle(const DenseMatrix& a, std::span<const double> y);

struct OneStepMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of ||y'||^2 over the row choice.
OneStepMoments theorem2_one_step_moments(const DenseMatrix& a, std::span<const double> y);

/// Mean and variance of <y/|y|, y'/|y'|>^2 over the row choice. Same errors as
/// theorem3_one_step_oracle.
OneStepMoments theorem3_one_step_moments(const DenseMatrix& a, std::span<const double> y);

/// S_k = E[e_k e_k^T] for k = 0..steps, propagated exactly through
/// S <- sum_i p_i P_i S P_i with P_i the projector onto a_i^perp.
/// O(steps * n^2 (n + m)).
std::vector<DenseMatrix> second_moments(const DenseMatrix& a,
                                        std::span<const double> e0,
                                        std::size_t steps);

/// E ||e_k||^2 = trace(S_k) for k = 0..steps. Each step chains the one-step
/// contraction identity over the full distribution of e_k.
Vector expected_sq_error(const DenseMatrix& a, std::span<const double> e0,
                         std::size_t steps);

inline constexpr std::size_t kMaxFourthMomentDim = 12;

/// E ||e_k||^4 for k = 0..steps, from the exact fourth-moment tensor
/// E[e (x) e (x) e (x) e]. O(steps * m * n^5); DomainError for
/// n > kMaxFourthMomentDim.
Vector expected_fourth_power_error(const DenseMatrix& a, std::span<const double> e0,
                                  std::size_t steps);

/// 1 - sigma_n^2 / ||A||_F^2, the worst-case per-step rate.
double worst_case_rate(const SvdFactorization& f, double frob_sq);

/// Runs randomized Kaczmarz on A x = 0 from x0 and logs ||A x_k|| / ||x_k||
/// and, when `f` is given, |<x_k / ||x_k||, v_n>|. The error column holds
/// ||x_k|| (the solution of the homogeneous system is 0).
/// Throws DomainError for x0 = 0.
IterateTrace minimize_rayleigh(const DenseMatrix& a, std::span<const double> x0,
                               const SolveConfig& cfg,
                               const SvdFactorization* f = nullptr);

/// CSV with header iter,rayleigh,overlap_vn.
void write_rayleigh_csv(std::ostream& out, const IterateTrace& trace);

/// Coordinate vectors e_1..e_n followed by `random_count` standard normal
/// vectors drawn from `seed`.
std::vector<Vector> make_probes(std::size_t n, std::size_t random_count,
                                std::uint64_t seed);

}  // namespace rk
