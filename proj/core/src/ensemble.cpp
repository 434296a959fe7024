#include "rk/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "rk/analysis.hpp"
#include "rk/errors.hpp"
#include "rk/matrix_io.hpp"
#include "rk/random.hpp"

namespace rk {

namespace {

constexpr std::size_t kBlockTrials = 64;

using Grid = std::vector<std::vector<RunningStats>>;  // [quantity][step]

struct Layout {
  std::size_t n = 0;
  std::size_t steps = 0;
  std::size_t sq_error = 0;
  std::size_t contraction = 0;
  std::size_t overlap = 0;
  std::size_t overlap_gap = 0;
  std::size_t sq_error_gap = 0;
  std::size_t overlap_gap_var = 0;
  std::size_t sq_error_gap_var = 0;
  std::size_t total = 0;
};

struct BlockResult {
  Grid grid;
  std::size_t skipped = 0;
};

}  // namespace

void RunningStats::add(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

Summary RunningStats::summary() const noexcept {
  Summary s;
  s.count = count_;
  s.mean = count_ ? mean_ : std::nan("");
  if (count_ >= 2) {
    const double var = m2_ / static_cast<double>(count_ - 1);
    s.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(count_));
  } else {
    s.std_error = std::nan("");
  }
  return s;
}

std::size_t EnsembleStats::index_of(const std::string& quantity) const {
  const auto it = std::find(quantities.begin(), quantities.end(), quantity);
  if (it == quantities.end()) {
    throw DomainError("ensemble does not track '" + quantity + "'");
  }
  return static_cast<std::size_t>(it - quantities.begin());
}

EnsembleStats ensemble_run(const DenseMatrix& a, std::span<const double> b,
                           std::span<const double> x0, const SolveConfig& cfg,
                           std::size_t trials, const SvdFactorization& f,
                           std::span<const double> true_x,
                           const EnsembleOptions& opts) {
  cfg.validate();
  if (trials < 2) throw DomainError("ensemble needs at least 2 trials");
  const std::size_t n = a.cols();
  if (b.size() != a.rows() || x0.size() != n || true_x.size() != n ||
      f.v.rows() != n) {
    throw DimensionError("ensemble_run: operand dimensions do not match the matrix");
  }
  {
    const double gap = norm2(subtract(matvec(a, true_x), b));
    if (gap > 1e-10 * norm2(b)) {
      throw DomainError("ensemble_run requires a consistent system");
    }
  }
  // Surfaces ZeroRowError before any thread starts.
  const RowSampler probe(a);
  (void)probe;

  EnsembleStats stats;
  stats.trials = trials;
  for (std::size_t k = 0; k <= cfg.max_iters; k += cfg.trace_every)
    stats.iters.push_back(k);

  Layout lay;
  lay.n = n;
  lay.steps = stats.iters.size();
  for (std::size_t l = 1; l <= n; ++l)
    stats.quantities.push_back("coef_" + std::to_string(l));
  lay.sq_error = stats.quantities.size();
  stats.quantities.push_back("sq_error");
  lay.contraction = stats.quantities.size();
  stats.quantities.push_back("contraction");
  lay.overlap = stats.quantities.size();
  stats.quantities.push_back("overlap");
  if (opts.track_oracle_gaps) {
    lay.overlap_gap = stats.quantities.size();
    stats.quantities.push_back("overlap_gap");
    lay.sq_error_gap = stats.quantities.size();
    stats.quantities.push_back("sq_error_gap");
    lay.overlap_gap_var = stats.quantities.size();
    stats.quantities.push_back("overlap_gap_var");
    lay.sq_error_gap_var = stats.quantities.size();
    stats.quantities.push_back("sq_error_gap_var");
  }
  lay.total = stats.quantities.size();

  auto run_block = [&](std::size_t first, std::size_t last) {
    BlockResult res;
    res.grid.assign(lay.total, std::vector<RunningStats>(lay.steps));
    Vector x(n), err(n), prev_err(n);
    for (std::size_t t = first; t < last; ++t) {
      KaczmarzStepper stepper(a, mix_seed(cfg.seed, t));
      std::copy(x0.begin(), x0.end(), x.begin());
      double prev_sq = 0.0;
      OneStepMoments predicted_overlap, predicted_sq;
      bool prev_ok = false;
      std::size_t slot = 0;
      for (std::size_t k = 0; k <= cfg.max_iters; ++k) {
        if (k > 0) stepper.step(x, b);
        if (k % cfg.trace_every != 0) continue;
        for (std::size_t j = 0; j < n; ++j) err[j] = x[j] - true_x[j];
        const double sq = norm_sq(err);
        const Vector coefs = matvec_transposed(f.v, err);
        for (std::size_t l = 0; l < n; ++l) res.grid[l][slot].add(coefs[l]);
        res.grid[lay.sq_error][slot].add(sq);
        if (k > 0) {
          if (prev_ok) {
            res.grid[lay.contraction][slot].add(sq / prev_sq);
            if (opts.track_oracle_gaps) {
              res.grid[lay.sq_error_gap][slot].add(sq - predicted_sq.mean);
              res.grid[lay.sq_error_gap_var][slot].add(predicted_sq.variance);
            }
          }
          if (prev_ok && sq > 0.0) {
            const double ov = dot(prev_err, err);
            const double overlap = ov * ov / (prev_sq * sq);
            res.grid[lay.overlap][slot].add(overlap);
            if (opts.track_oracle_gaps && !std::isnan(predicted_overlap.mean)) {
              res.grid[lay.overlap_gap][slot].add(overlap - predicted_overlap.mean);
              res.grid[lay.overlap_gap_var][slot].add(predicted_overlap.variance);
            }
          } else {
            ++res.skipped;
          }
        }
        prev_ok = sq > 0.0;
        prev_sq = sq;
        prev_err = err;
        if (opts.track_oracle_gaps && prev_ok) {
          predicted_sq = theorem2_one_step_moments(a, err);
          try {
            predicted_overlap = theorem3_one_step_moments(a, err);
          } catch (const HypothesisError&) {
            // The one-step oracle is undefined here; no overlap gap is recorded.
            predicted_overlap = {std::nan(""), 0.0};
          }
        }
        ++slot;
      }
    }
    return res;
  };

  const std::size_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<BlockResult> results(blocks);
  unsigned workers = opts.threads ? opts.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t blk = next.fetch_add(1);
      if (blk >= blocks) return;
      try {
        results[blk] = run_block(blk * kBlockTrials,
                                 std::min(trials, (blk + 1) * kBlockTrials));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Grid merged(lay.total, std::vector<RunningStats>(lay.steps));
  for (const BlockResult& r : results) {
    for (std::size_t q = 0; q < lay.total; ++q)
      for (std::size_t s = 0; s < lay.steps; ++s) merged[q][s].merge(r.grid[q][s]);
    stats.skipped_zero += r.skipped;
  }
  stats.table.resize(lay.total);
  for (std::size_t q = 0; q < lay.total; ++q) {
    stats.table[q].reserve(lay.steps);
    for (std::size_t s = 0; s < lay.steps; ++s)
      stats.table[q].push_back(merged[q][s].summary());
  }
  return stats;
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "iter,quantity,mean,stderr\n";
  for (std::size_t s = 0; s < stats.iters.size(); ++s) {
    for (std::size_t q = 0; q < stats.quantities.size(); ++q) {
      const Summary& v = stats.table[q][s];
      out << stats.iters[s] << ',' << stats.quantities[q] << ','
          << format_scalar(v.mean) << ',' << format_scalar(v.std_error) << '\n';
    }
  }
}

}  // namespace rk
