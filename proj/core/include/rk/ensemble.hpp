#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rk/kaczmarz.hpp"
#include "rk/linalg.hpp"

namespace rk {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(count)
};

/// Streaming mean/variance (Welford), mergeable with Chan's update.
class RunningStats {
 public:
  void add(double x) noexcept;
  void merge(const RunningStats& other) noexcept;
  Summary summary() const noexcept;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct EnsembleOptions {
  // Also record overlap_gap and sq_error_gap: realized value minus the exact
  // one-step oracle evaluated at the previous logged iterate. Meaningful for
  // trace_every == 1. Costs O(mn) per step per trial.
  bool track_oracle_gaps = false;
  // Worker threads; 0 picks hardware_concurrency.
  unsigned threads = 0;
};

/// Per logged step, per tracked quantity: sample mean and standard error
/// across independent trials. Quantities, in order:
///   coef_1..coef_n  signed <x_k - x, v_l>
///   sq_error        ||x_k - x||^2
///   contraction     ||x_k - x||^2 / ||x_prev - x||^2 between consecutive
///                   logged iterates
///   overlap         <e_prev/|e_prev|, e_k/|e_k|>^2 between consecutive logged
///                   iterates
///   overlap_gap, sq_error_gap  (with EnsembleOptions::track_oracle_gaps)
///   overlap_gap_var, sq_error_gap_var  exact one-step variance of the
///                   realized value given the previous iterate
/// Pairs starting from a zero error vector are skipped; overlap additionally
/// skips pairs ending at zero. Skipped overlap pairs are counted in
/// `skipped_zero`. At k = 0 the pairwise quantities have count 0.
struct EnsembleStats {
  std::size_t trials = 0;
  std::vector<std::size_t> iters;
  std::vector<std::string> quantities;
  std::vector<std::vector<Summary>> table;  // [quantity][logged step]
  std::size_t skipped_zero = 0;

  std::size_t index_of(const std::string& quantity) const;
  const std::vector<Summary>& operator[](const std::string& quantity) const {
    return table[index_of(quantity)];
  }
};

/// Trial t runs `solve` semantics with seed mix_seed(cfg.seed, t) for exactly
/// cfg.max_iters steps (residual_tol is ignored), logging every
/// cfg.trace_every steps. Trials are processed in fixed blocks and merged in
/// trial order, so results do not depend on the thread count.
EnsembleStats ensemble_run(const DenseMatrix& a, std::span<const double> b,
                           std::span<const double> x0, const SolveConfig& cfg,
                           std::size_t trials, const SvdFactorization& f,
                           std::span<const double> true_x,
                           const EnsembleOptions& opts = {});

/// CSV with header iter,quantity,mean,stderr.
void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats);

}  // namespace rk
