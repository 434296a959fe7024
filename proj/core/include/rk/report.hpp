#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rk/ensemble.hpp"
#include "rk/linalg.hpp"

namespace rk {

enum class DeviationMetric {
  Absolute,        // |observed - predicted| scaled by the probe norm
  StandardErrors,  // |observed - predicted| / standard error
};

struct TheoremCheck {
  std::string label;
  double predicted = 0.0;
  double observed = 0.0;
  double deviation = 0.0;
};

/// Outcome of one verification suite. pass <=> max_deviation <= tolerance.
struct TheoremReport {
  TheoremReport(int theorem_id, std::string suite_name, DeviationMetric m, double tol)
      : theorem(theorem_id), suite(std::move(suite_name)), metric(m), tolerance(tol) {}

  int theorem = 0;
  std::string suite;
  DeviationMetric metric = DeviationMetric::Absolute;
  double tolerance = 0.0;
  std::vector<TheoremCheck> checks;
  double max_deviation = 0.0;
  bool pass = true;

  void add(std::string label, double predicted, double observed, double deviation);
};

inline constexpr double kOracleTolerance = 1e-10;
inline constexpr double kStandardErrors = 4.0;

// Exact suites: one-step enumeration against the closed form for every probe.

/// |E<y', v_l> - (1 - sigma_l^2/F) <y, v_l>| / ||y|| for every probe and l.
TheoremReport verify_theorem1_exact(const DenseMatrix& a, const SvdFactorization& f,
                                    std::span<const Vector> probes);

/// |E||y'||^2 - contraction_factor(y) ||y||^2| / ||y||^2 for every probe.
TheoremReport verify_theorem2_exact(const DenseMatrix& a,
                                    std::span<const Vector> probes);

/// |E<y^, y'^>^2 - (1 - ||A y^||^2 / F)| for every probe. Propagates
/// HypothesisError from the first violating probe.
TheoremReport verify_theorem3_exact(const DenseMatrix& a,
                                    std::span<const Vector> probes);

// Monte Carlo suites, evaluated on the output of ensemble_run started from
// error e0 = x0 - x.

/// Signed mean of <x_k - x, v_l> against (1 - sigma_l^2/F)^k <e0, v_l> at every
/// logged k and every l. The standard error is the larger of the sample value
/// and the exact one implied by second_moments (the sample value degenerates
/// to 0 when almost every trial lands on the same outcome).
TheoremReport verify_theorem1_monte_carlo(const DenseMatrix& a,
                                          const SvdFactorization& f,
                                          const EnsembleStats& stats,
                                          std::span<const double> e0);

/// Mean ||x_k - x||^2 against the exact chained expectation
/// (expected_sq_error) at every logged k; with tracked oracle gaps also the
/// per-step realized-oracle gap against 0. For n <= kMaxFourthMomentDim the
/// standard error is floored by the exact one from expected_fourth_power_error.
TheoremReport verify_theorem2_monte_carlo(const DenseMatrix& a,
                                          const EnsembleStats& stats,
                                          std::span<const double> e0);

/// Mean overlap gap (realized overlap^2 minus the one-step oracle at the
/// previous iterate) against 0. Requires tracked oracle gaps. Gap standard
/// errors are floored by the tracked exact conditional variances.
TheoremReport verify_theorem3_monte_carlo(const EnsembleStats& stats);

/// |mean - predicted| / se, where se is floored at 1e-12 of the magnitudes
/// involved so identical deterministic samples compare by relative roundoff.
double standard_error_deviation(double mean, double se, double predicted);

/// Header theorem,suite,check,predicted,observed,deviation,tolerance,pass.
void write_report_csv(std::ostream& out, std::span<const TheoremReport> reports);

/// One line per report: theorem, suite, check count, max deviation, PASS/FAIL.
void write_report_summary(std::ostream& out, std::span<const TheoremReport> reports);

}  // namespace rk
