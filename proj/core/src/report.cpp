#include "rk/report.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <ostream>

#include "rk/analysis.hpp"
#include "rk/errors.hpp"
#include "rk/matrix_io.hpp"

namespace rk {

namespace {

std::string label_of(std::size_t probe, std::size_t l) {
  return "probe=" + std::to_string(probe + 1) + " l=" + std::to_string(l + 1);
}

const char* metric_name(DeviationMetric m) {
  return m == DeviationMetric::Absolute ? "abs" : "stderr";
}

// Gaps are martingale differences, so the variance of their mean is the mean
// of the exact conditional variances over count.
double gap_standard_error(const Summary& gap, const Summary& conditional_var) {
  const double exact = std::sqrt(conditional_var.mean / static_cast<double>(gap.count));
  return std::max(gap.std_error, exact);
}

}  // namespace

void TheoremReport::add(std::string label, double predicted, double observed,
                        double deviation) {
  // NaN deviations must fail, so compare with the negated form.
  if (!(deviation <= tolerance)) pass = false;
  if (std::isnan(deviation) || deviation > max_deviation) max_deviation = deviation;
  checks.push_back({std::move(label), predicted, observed, deviation});
}

double standard_error_deviation(double mean, double se, double predicted) {
  const double floor =
      1e-12 * std::max(std::abs(mean), std::abs(predicted)) + DBL_MIN;
  return std::abs(mean - predicted) / std::max(se, floor);
}

TheoremReport verify_theorem1_exact(const DenseMatrix& a, const SvdFactorization& f,
                                    std::span<const Vector> probes) {
  TheoremReport r{1, "one-step enumeration", DeviationMetric::Absolute,
                  kOracleTolerance};
  const double frob = frobenius_norm_sq(a);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Vector& y = probes[p];
    const double ny = norm2(y);
    const Vector c = singular_coefficients(f, y);
    for (std::size_t l = 0; l < f.rank_size(); ++l) {
      const double predicted = predicted_coefficient(f.sigma[l], frob, 1, c[l]);
      const double observed = theorem1_one_step_oracle(a, f, y, l);
      const double scale = ny > 0.0 ? ny : 1.0;
      r.add(label_of(p, l), predicted, observed, std::abs(observed - predicted) / scale);
    }
  }
  return r;
}

TheoremReport verify_theorem2_exact(const DenseMatrix& a,
                                    std::span<const Vector> probes) {
  TheoremReport r{2, "one-step enumeration", DeviationMetric::Absolute,
                  kOracleTolerance};
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Vector& y = probes[p];
    const double ny2 = norm_sq(y);
    const double observed = theorem2_one_step_oracle(a, y);
    const double predicted = ny2 > 0.0 ? contraction_factor(a, y) * ny2 : 0.0;
    const double scale = ny2 > 0.0 ? ny2 : 1.0;
    r.add("probe=" + std::to_string(p + 1), predicted, observed,
          std::abs(observed - predicted) / scale);
  }
  return r;
}

TheoremReport verify_theorem3_exact(const DenseMatrix& a,
                                    std::span<const Vector> probes) {
  TheoremReport r{3, "one-step enumeration", DeviationMetric::Absolute,
                  kOracleTolerance};
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Vector& y = probes[p];
    const double observed = theorem3_one_step_oracle(a, y);
    const double predicted = contraction_factor(a, y);
    r.add("probe=" + std::to_string(p + 1), predicted, observed,
          std::abs(observed - predicted));
  }
  return r;
}

TheoremReport verify_theorem1_monte_carlo(const DenseMatrix& a,
                                          const SvdFactorization& f,
                                          const EnsembleStats& stats,
                                          std::span<const double> e0) {
  TheoremReport r{1, "monte carlo", DeviationMetric::StandardErrors, kStandardErrors};
  const double frob = frobenius_norm_sq(a);
  const std::size_t n = f.rank_size();
  const Vector c0 = singular_coefficients(f, e0);
  const std::size_t horizon = stats.iters.empty() ? 0 : stats.iters.back();
  const std::vector<DenseMatrix> moments = second_moments(a, e0, horizon);
  for (std::size_t l = 0; l < n; ++l) {
    const Vector vl = f.right_vector(l);
    const auto& column = stats["coef_" + std::to_string(l + 1)];
    for (std::size_t s = 0; s < stats.iters.size(); ++s) {
      const std::size_t k = stats.iters[s];
      const Summary& obs = column[s];
      if (obs.count < 2) continue;
      const double predicted = predicted_coefficient(f.sigma[l], frob, k, c0[l]);
      const double second = dot(vl, matvec(moments[k], vl));
      const double var = std::max(second - predicted * predicted, 0.0);
      const double null_se = std::sqrt(var / static_cast<double>(obs.count));
      const double se = std::max(obs.std_error, null_se);
      r.add("k=" + std::to_string(k) + " l=" + std::to_string(l + 1), predicted,
            obs.mean, standard_error_deviation(obs.mean, se, predicted));
    }
  }
  return r;
}

TheoremReport verify_theorem2_monte_carlo(const DenseMatrix& a,
                                          const EnsembleStats& stats,
                                          std::span<const double> e0) {
  TheoremReport r{2, "monte carlo", DeviationMetric::StandardErrors, kStandardErrors};
  const std::size_t horizon = stats.iters.empty() ? 0 : stats.iters.back();
  const Vector expected = expected_sq_error(a, e0, horizon);
  Vector fourth;
  if (a.cols() <= kMaxFourthMomentDim) fourth = expected_fourth_power_error(a, e0, horizon);
  const auto& sq = stats["sq_error"];
  for (std::size_t s = 0; s < stats.iters.size(); ++s) {
    const std::size_t k = stats.iters[s];
    if (sq[s].count < 2) continue;
    double se = sq[s].std_error;
    if (!fourth.empty()) {
      const double var = std::max(fourth[k] - expected[k] * expected[k], 0.0);
      se = std::max(se, std::sqrt(var / static_cast<double>(sq[s].count)));
    }
    r.add("k=" + std::to_string(k) + " mean_sq_error", expected[k], sq[s].mean,
          standard_error_deviation(sq[s].mean, se, expected[k]));
  }
  const auto it = std::find(stats.quantities.begin(), stats.quantities.end(),
                            "sq_error_gap");
  if (it != stats.quantities.end()) {
    const auto& gap = stats["sq_error_gap"];
    const auto& var = stats["sq_error_gap_var"];
    for (std::size_t s = 0; s < stats.iters.size(); ++s) {
      if (gap[s].count < 2) continue;
      r.add("k=" + std::to_string(stats.iters[s]) + " one_step_gap", 0.0, gap[s].mean,
            standard_error_deviation(gap[s].mean, gap_standard_error(gap[s], var[s]), 0.0));
    }
  }
  return r;
}

TheoremReport verify_theorem3_monte_carlo(const EnsembleStats& stats) {
  TheoremReport r{3, "monte carlo", DeviationMetric::StandardErrors, kStandardErrors};
  const auto& gap = stats["overlap_gap"];
  const auto& var = stats["overlap_gap_var"];
  for (std::size_t s = 0; s < stats.iters.size(); ++s) {
    if (gap[s].count < 2) continue;
    r.add("k=" + std::to_string(stats.iters[s]) + " overlap_gap", 0.0, gap[s].mean,
          standard_error_deviation(gap[s].mean, gap_standard_error(gap[s], var[s]), 0.0));
  }
  return r;
}

void write_report_csv(std::ostream& out, std::span<const TheoremReport> reports) {
  out << "theorem,suite,check,predicted,observed,deviation,tolerance,pass\n";
  for (const TheoremReport& r : reports) {
    for (const TheoremCheck& c : r.checks) {
      out << r.theorem << ',' << r.suite << ',' << c.label << ','
          << format_scalar(c.predicted) << ',' << format_scalar(c.observed) << ','
          << format_scalar(c.deviation) << ',' << format_scalar(r.tolerance) << ','
          << (c.deviation <= r.tolerance ? 1 : 0) << '\n';
    }
  }
}

void write_report_summary(std::ostream& out, std::span<const TheoremReport> reports) {
  for (const TheoremReport& r : reports) {
    out << "theorem " << r.theorem << " [" << r.suite << "]: " << r.checks.size()
        << " checks, max deviation " << format_scalar(r.max_deviation) << " ("
        << metric_name(r.metric) << ") <= " << format_scalar(r.tolerance) << ": "
        << (r.pass ? "PASS" : "FAIL") << '\n';
  }
}

}  // namespace rk
