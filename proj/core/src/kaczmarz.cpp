#include "rk/kaczmarz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "rk/errors.hpp"
#include "rk/matrix_io.hpp"

namespace rk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void require_length(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + " has length " +
                         std::to_string(v.size()) + ", expected " +
                         std::to_string(n));
  }
}

}  // namespace

RowSampler::RowSampler(const DenseMatrix& a) : cumulative_(a.rows()) {
  double running = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double w = norm_sq(a.row(i));
    if (w == 0.0) throw ZeroRowError(i);
    running += w;
    cumulative_[i] = running;
  }
}

double RowSampler::probability(std::size_t i) const {
  const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
  return (cumulative_[i] - lo) / total();
}

std::size_t RowSampler::pick(double u) const {
  const double target = u * total();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  // u * total can round up to total itself.
  if (it == cumulative_.end()) return cumulative_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

Vector project_step(const DenseMatrix& a, std::span<const double> b,
                    std::span<const double> x, std::size_t i) {
  require_length(x, a.cols(), "x");
  require_length(b, a.rows(), "b");
  if (i >= a.rows()) {
    throw DimensionError("row index " + std::to_string(i + 1) + " out of range");
  }
  const double w = norm_sq(a.row(i));
  if (w == 0.0) throw ZeroRowError(i);
  Vector next(x.begin(), x.end());
  project_in_place(a.row(i), b[i], w, next);
  return next;
}

void SolveConfig::validate() const {
  if (max_iters == 0) throw DomainError("max_iters must be at least 1");
  if (trace_every == 0) throw DomainError("trace_every must be at least 1");
  if (!(residual_tol >= 0.0) || !std::isfinite(residual_tol)) {
    throw DomainError("residual_tol must be finite and nonnegative");
  }
}

KaczmarzStepper::KaczmarzStepper(const DenseMatrix& a, std::uint64_t seed)
    : a_(&a), sampler_(a), row_norms_sq_(row_norms_sq(a)), rng_(seed) {}

std::size_t KaczmarzStepper::step(std::span<double> x, std::span<const double> b) {
  const std::size_t i = sampler_.sample(rng_);
  project_in_place(a_->row(i), b[i], row_norms_sq_[i], x);
  return i;
}

std::size_t KaczmarzStepper::step_homogeneous(std::span<double> x) {
  const std::size_t i = sampler_.sample(rng_);
  project_in_place(a_->row(i), 0.0, row_norms_sq_[i], x);
  return i;
}

IterateTrace solve(const DenseMatrix& a, std::span<const double> b,
                   std::span<const double> x0, const SolveConfig& cfg,
                   std::optional<std::span<const double>> true_x,
                   const SvdFactorization* svd) {
  cfg.validate();
  require_length(b, a.rows(), "b");
  require_length(x0, a.cols(), "x0");
  if (true_x) {
    require_length(*true_x, a.cols(), "true_x");
    const double gap = norm2(subtract(matvec(a, *true_x), b));
    if (gap > 1e-10 * norm2(b)) {
      throw DomainError("system is not consistent with the reference solution: "
                        "||A x - b|| = " + format_scalar(gap));
    }
  }
  const bool track = cfg.track_coefficients;
  if (track && (!true_x || svd == nullptr)) {
    throw DomainError("coefficient tracking needs a reference solution and an SVD");
  }
  if (svd != nullptr && svd->v.rows() != a.cols()) {
    throw DimensionError("SVD does not match the matrix");
  }
  const bool homogeneous = all_zero(b);
  const Vector smallest_dir =
      svd != nullptr ? svd->right_vector(svd->rank_size() - 1) : Vector{};

  KaczmarzStepper stepper(a, cfg.seed);
  IterateTrace trace;
  Vector x(x0.begin(), x0.end());

  auto measure = [&](std::size_t k, std::optional<std::size_t> row) {
    TraceEntry e;
    e.iter = k;
    e.row = row;
    const Vector ax = matvec(a, x);
    e.residual = norm2(subtract(ax, b));
    e.error = kNaN;
    e.rayleigh = kNaN;
    e.overlap = kNaN;
    if (true_x) {
      const Vector err = subtract(x, *true_x);
      e.error = norm2(err);
      if (track) e.coefficients = matvec_transposed(svd->v, err);
    }
    if (homogeneous) {
      const double nx = norm2(x);
      if (nx > 0.0) {
        e.rayleigh = norm2(ax) / nx;
        if (svd != nullptr) e.overlap = std::abs(dot(x, smallest_dir)) / nx;
      }
    }
    return e;
  };

  trace.entries.push_back(measure(0, std::nullopt));
  std::size_t k = 0;
  while (k < cfg.max_iters) {
    const std::size_t row = stepper.step(x, b);
    ++k;
    if (k % cfg.trace_every == 0) {
      trace.entries.push_back(measure(k, row));
      if (trace.entries.back().residual <= cfg.residual_tol) {
        trace.converged = true;
        break;
      }
    }
  }

  const TraceEntry last = measure(k, std::nullopt);
  trace.iterations = k;
  trace.final_residual = last.residual;
  trace.final_error = last.error;
  trace.final_x = std::move(x);
  return trace;
}

void write_trace_csv(std::ostream& out, const IterateTrace& trace) {
  const std::size_t ncoef =
      trace.entries.empty() ? 0 : trace.entries.front().coefficients.size();
  out << "iter,row,residual,error,rayleigh";
  for (std::size_t l = 1; l <= ncoef; ++l) out << ",coef_" << l;
  out << '\n';
  for (const TraceEntry& e : trace.entries) {
    out << e.iter << ',' << (e.row ? *e.row + 1 : 0) << ','
        << format_scalar(e.residual) << ',' << format_scalar(e.error) << ','
        << format_scalar(e.rayleigh);
    for (double c : e.coefficients) out << ',' << format_scalar(c);
    out << '\n';
  }
}

}  // namespace rk
