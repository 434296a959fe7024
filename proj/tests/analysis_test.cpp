#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "rk/analysis.hpp"
#include "rk/ensemble.hpp"
#include "rk/errors.hpp"
#include "rk/generators.hpp"
#include "rk/report.hpp"
#include "test_support.hpp"

using namespace rk;
using rk::testing::gaussian_matrix;
using rk::testing::gaussian_vector;

namespace {

// Brute force over all m^k row sequences: E[g(e_k)] for the homogeneous
// iteration from e0. Independent of the second-moment recursion.
double enumerate_paths(const DenseMatrix& a, const Vector& e0, std::size_t k,
                       const std::function<double(const Vector&)>& g) {
  const double frob = frobenius_norm_sq(a);
  std::function<double(const Vector&, std::size_t)> rec = [&](const Vector& e,
                                                               std::size_t left) {
    if (left == 0) return g(e);
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double w = norm_sq(a.row(i));
      const Vector next = project_step(a, Vector(a.rows(), 0.0), e, i);
      total += (w / frob) * rec(next, left - 1);
    }
    return total;
  };
  return rec(e0, k);
}

const Summary& at(const EnsembleStats& s, const std::string& q, std::size_t step) {
  return s[q][step];
}

}  // namespace

TEST(SingularCoefficients, Examples) {
  const DenseMatrix a = gaussian_matrix(7, 4, 1);
  const SvdFactorization f = svd(a);
  const Vector c = singular_coefficients(f, f.right_vector(3));
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(c[l], 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c[3]), 1.0, 1e-14);
  EXPECT_EQ(singular_coefficients(f, Vector(4, 0.0)), Vector(4, 0.0));
  EXPECT_THROW(singular_coefficients(f, Vector(3, 1.0)), DimensionError);
}

TEST(SingularCoefficients, Parseval) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const DenseMatrix a = gaussian_matrix(9, 5, seed);
    const SvdFactorization f = svd(a);
    const Vector e = gaussian_vector(5, seed + 99);
    EXPECT_NEAR(norm_sq(singular_coefficients(f, e)), norm_sq(e), 1e-10);
  }
}

TEST(PredictedCoefficient, Examples) {
  EXPECT_EQ(predicted_coefficient(1.5, 4.0, 0, 0.7), 0.7);
  EXPECT_EQ(predicted_coefficient(2.0, 4.0, 1, 3.0), 0.0);
  EXPECT_EQ(predicted_coefficient(2.0, 4.0, 5, 3.0), 0.0);
  EXPECT_NEAR(predicted_coefficient(std::sqrt(2.0), 4.0, 3, 1.0), 0.125, 1e-15);
  EXPECT_THROW(predicted_coefficient(3.0, 4.0, 1, 1.0), DomainError);
  EXPECT_THROW(predicted_coefficient(-1.0, 4.0, 1, 1.0), DomainError);
  EXPECT_THROW(predicted_coefficient(1.0, 0.0, 1, 1.0), DomainError);
}

TEST(CoefficientOracle, HandEnumeration) {
  const DenseMatrix a(2, 2, {1, 1, 1, -1});
  const SvdFactorization f = svd(a);
  // Outcomes (1/2,-1/2) and (1/2,1/2), each with probability 1/2; with
  // sigma^2 = 2 and F = 4 the closed form is (1/2) <y, v_l>.
  const Vector y{1, 0};
  for (std::size_t l = 0; l < 2; ++l) {
    const Vector v = f.right_vector(l);
    const double by_hand = 0.5 * dot(Vector{0.5, -0.5}, v) + 0.5 * dot(Vector{0.5, 0.5}, v);
    EXPECT_NEAR(theorem1_one_step_oracle(a, f, y, l), by_hand, 1e-15);
    EXPECT_NEAR(by_hand, 0.5 * dot(y, v), 1e-15);
  }
  EXPECT_EQ(theorem1_one_step_oracle(a, f, Vector{0, 0}, 0), 0.0);
}

TEST(CoefficientOracle, MatchesClosedFormOnRandomMatrices) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = gaussian_matrix(6, 4, seed);
    const SvdFactorization f = svd(a);
    const double frob = frobenius_norm_sq(a);
    for (std::uint64_t p = 0; p < 10; ++p) {
      const Vector y = gaussian_vector(4, 1000 * seed + p);
      for (std::size_t l = 0; l < 4; ++l) {
        const double closed =
            (1.0 - f.sigma[l] * f.sigma[l] / frob) * dot(y, f.right_vector(l));
        EXPECT_NEAR(theorem1_one_step_oracle(a, f, y, l), closed, 1e-10 * norm2(y));
      }
    }
  }
}

TEST(ContractionFactor, Examples) {
  EXPECT_DOUBLE_EQ(contraction_factor(DenseMatrix::identity(4), Vector{1, 2, 3, 4}), 0.75);
  EXPECT_DOUBLE_EQ(contraction_factor(DenseMatrix(2, 2, {1, 1, 1, -1}), Vector{1, 0}), 0.5);
  EXPECT_THROW(contraction_factor(DenseMatrix::identity(2), Vector{0, 0}), DomainError);

  const DenseMatrix a = gaussian_matrix(10, 6, 4);
  const SvdFactorization f = svd(a);
  const double frob = frobenius_norm_sq(a);
  EXPECT_NEAR(contraction_factor(a, f.right_vector(5)), worst_case_rate(f, frob), 1e-12);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const double c = contraction_factor(a, gaussian_vector(6, s));
    EXPECT_GE(c, 1.0 - f.largest() * f.largest() / frob - 1e-12);
    EXPECT_LE(c, worst_case_rate(f, frob) + 1e-12);
  }
}

TEST(SquaredNormOracle, HandEnumeration) {
  // Identity 2x2, y = e_1: outcomes 0 and e_1 with probability 1/2 each.
  EXPECT_DOUBLE_EQ(theorem2_one_step_oracle(DenseMatrix::identity(2), Vector{1, 0}), 0.5);
  EXPECT_EQ(theorem2_one_step_oracle(DenseMatrix::identity(2), Vector{0, 0}), 0.0);
}

TEST(SquaredNormOracle, EqualsContractionTimesNormSquared) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = gaussian_matrix(6, 4, seed + 20);
    for (std::uint64_t p = 0; p < 10; ++p) {
      const Vector y = gaussian_vector(4, 7000 + 10 * seed + p);
      EXPECT_NEAR(theorem2_one_step_oracle(a, y), contraction_factor(a, y) * norm_sq(y),
                  1e-10 * norm_sq(y));
    }
  }
}

TEST(OverlapOracle, HandEnumeration) {
  // Both normalized outcomes (1,-1)/sqrt2 and (1,1)/sqrt2 have overlap^2 1/2.
  EXPECT_NEAR(theorem3_one_step_oracle(DenseMatrix(2, 2, {1, 1, 1, -1}), Vector{1, 0}), 0.5,
              1e-15);
}

TEST(OverlapOracle, HypothesisViolationNamesRow) {
  try {
    theorem3_one_step_oracle(DenseMatrix::identity(2), Vector{1, 0});
    FAIL() << "expected HypothesisError";
  } catch (const HypothesisError& e) {
    EXPECT_EQ(e.row(), 0u);
  }
  try {
    theorem3_one_step_oracle(DenseMatrix::identity(3), Vector{0, 0, 2});
    FAIL() << "expected HypothesisError";
  } catch (const HypothesisError& e) {
    EXPECT_EQ(e.row(), 2u);
  }
  EXPECT_THROW(theorem3_one_step_oracle(DenseMatrix::identity(2), Vector{0, 0}), DomainError);
}

TEST(OverlapOracle, SmallestSingularDirectionIsNearlyFrozen) {
  const DenseMatrix a = gaussian_shifted_duplicate(40, 10.0 * std::sqrt(40.0), 0.01, 3);
  const SvdFactorization f = svd(a);
  const double frob = frobenius_norm_sq(a);
  const double value = theorem3_one_step_oracle(a, f.right_vector(39));
  EXPECT_NEAR(value, 1.0 - f.smallest() * f.smallest() / frob, 1e-10);
  EXPECT_GT(value, 1.0 - 1e-6);
}

TEST(OverlapOracle, MatchesClosedFormAndBounds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = gaussian_matrix(6, 4, seed + 40);
    const SvdFactorization f = svd(a);
    const double frob = frobenius_norm_sq(a);
    for (std::uint64_t p = 0; p < 10; ++p) {
      const Vector y = gaussian_vector(4, 9000 + 10 * seed + p);
      const double ny = norm2(y);
      const double closed = 1.0 - norm_sq(matvec(a, y)) / (frob * ny * ny);
      const double value = theorem3_one_step_oracle(a, y);
      EXPECT_NEAR(value, closed, 1e-10);
      EXPECT_GE(value, 1.0 - f.largest() * f.largest() / frob - 1e-10);
      EXPECT_LE(value, 1.0 - f.smallest() * f.smallest() / frob + 1e-10);
    }
  }
}

TEST(OneStepMoments, HandEnumeration) {
  // Identity 2x2, y = e_1: ||y'||^2 is 0 or 1 with probability 1/2 each.
  const OneStepMoments sq = theorem2_one_step_moments(DenseMatrix::identity(2), Vector{1, 0});
  EXPECT_DOUBLE_EQ(sq.mean, 0.5);
  EXPECT_DOUBLE_EQ(sq.variance, 0.25);
  // Hadamard: both outcomes have overlap^2 1/2, so no spread.
  const OneStepMoments ov =
      theorem3_one_step_moments(DenseMatrix(2, 2, {1, 1, 1, -1}), Vector{1, 0});
  EXPECT_NEAR(ov.mean, 0.5, 1e-15);
  EXPECT_NEAR(ov.variance, 0.0, 1e-15);
}

TEST(SecondMoments, MatchBruteForcePathEnumeration) {
  const DenseMatrix a = gaussian_matrix(4, 3, 5);
  const SvdFactorization f = svd(a);
  const Vector e0 = gaussian_vector(3, 6);
  const std::size_t horizon = 4;
  const Vector expected = expected_sq_error(a, e0, horizon);
  const std::vector<DenseMatrix> moments = second_moments(a, e0, horizon);
  for (std::size_t k = 0; k <= horizon; ++k) {
    const double brute =
        enumerate_paths(a, e0, k, [](const Vector& e) { return norm_sq(e); });
    EXPECT_NEAR(expected[k], brute, 1e-12 * norm_sq(e0));
    const Vector v = f.right_vector(2);
    const double brute_c2 = enumerate_paths(a, e0, k, [&](const Vector& e) {
      const double c = dot(e, v);
      return c * c;
    });
    EXPECT_NEAR(dot(v, matvec(moments[k], v)), brute_c2, 1e-12 * norm_sq(e0));
  }
  // Mean coefficients over k steps, also by brute force.
  const double frob = frobenius_norm_sq(a);
  for (std::size_t l = 0; l < 3; ++l) {
    const Vector v = f.right_vector(l);
    const double mean =
        enumerate_paths(a, e0, 3, [&](const Vector& e) { return dot(e, v); });
    EXPECT_NEAR(mean, predicted_coefficient(f.sigma[l], frob, 3, dot(e0, v)), 1e-12);
  }
}

TEST(FourthMoments, MatchBruteForcePathEnumeration) {
  const DenseMatrix a = gaussian_matrix(4, 3, 11);
  const Vector e0 = gaussian_vector(3, 12);
  const Vector fourth = expected_fourth_power_error(a, e0, 4);
  for (std::size_t k = 0; k <= 4; ++k) {
    const double brute = enumerate_paths(a, e0, k, [](const Vector& e) {
      const double s = norm_sq(e);
      return s * s;
    });
    EXPECT_NEAR(fourth[k], brute, 1e-12 * std::pow(norm_sq(e0), 2));
  }
  EXPECT_THROW(expected_fourth_power_error(gaussian_matrix(20, 13, 1), Vector(13, 1.0), 1),
               DomainError);
}

TEST(FourthMoments, DiagonalClosedForm) {
  // diag(2,1,1), e0 = (1,1,1): ||e_k||^2 counts the coordinates not yet hit.
  const DenseMatrix a = diagonal(Vector{2, 1, 1});
  const Vector e0{1, 1, 1};
  const Vector fourth = expected_fourth_power_error(a, e0, 6);
  const Vector second = expected_sq_error(a, e0, 6);
  for (std::size_t k = 0; k <= 6; ++k) {
    // P(coordinate j unhit) = (1 - p_j)^k, P(j and l unhit) = (1 - p_j - p_l)^k.
    const double p[3] = {4.0 / 6, 1.0 / 6, 1.0 / 6};
    double e2 = 0.0, e4 = 0.0;
    for (int j = 0; j < 3; ++j) {
      e2 += std::pow(1 - p[j], double(k));
      for (int l = 0; l < 3; ++l)
        e4 += j == l ? std::pow(1 - p[j], double(k)) : std::pow(1 - p[j] - p[l], double(k));
    }
    EXPECT_NEAR(second[k], e2, 1e-14);
    EXPECT_NEAR(fourth[k], e4, 1e-14);
  }
}

TEST(WorstCaseRate, IsInverseConditionRate) {
  // sigma_n = 1 / ||A^{-1}||_2; for diag(3, 1, 0.5), ||A^{-1}||_2 = 2.
  const DenseMatrix a = diagonal(Vector{3, 1, 0.5});
  const SvdFactorization f = svd(a);
  const double frob = frobenius_norm_sq(a);
  EXPECT_DOUBLE_EQ(worst_case_rate(f, frob), 1.0 - 1.0 / (frob * 2.0 * 2.0));
}

TEST(Ensemble, DistinctTrialsDrawDistinctRows) {
  const DenseMatrix a = gaussian_matrix(30, 5, 2);
  std::set<std::vector<std::size_t>> sequences;
  for (std::uint64_t t = 0; t < 100; ++t) {
    KaczmarzStepper stepper(a, mix_seed(17, t));
    Vector x(5, 1.0);
    std::vector<std::size_t> rows;
    for (int k = 0; k < 20; ++k) rows.push_back(stepper.step_homogeneous(x));
    sequences.insert(rows);
  }
  EXPECT_EQ(sequences.size(), 100u);
}

TEST(Ensemble, TrialsReplaySolveWithDerivedSeeds) {
  const ConsistentSystem sys = random_consistent(10, 4, 9);
  const SvdFactorization f = svd(sys.a);
  const Vector x0{1, -1, 2, 0};
  SolveConfig cfg;
  cfg.seed = 1234;
  cfg.max_iters = 40;
  cfg.trace_every = 5;
  cfg.track_coefficients = true;
  const EnsembleStats stats = ensemble_run(sys.a, sys.b, x0, cfg, 2, f, sys.true_x);

  std::vector<IterateTrace> traces;
  for (std::uint64_t t = 0; t < 2; ++t) {
    SolveConfig c = cfg;
    c.seed = mix_seed(cfg.seed, t);
    traces.push_back(solve(sys.a, sys.b, x0, c, std::span<const double>(sys.true_x), &f));
  }
  ASSERT_EQ(stats.iters.size(), traces[0].entries.size());
  for (std::size_t s = 0; s < stats.iters.size(); ++s) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double mean = 0.5 * (traces[0].entries[s].coefficients[l] +
                                 traces[1].entries[s].coefficients[l]);
      EXPECT_NEAR(at(stats, "coef_" + std::to_string(l + 1), s).mean, mean, 1e-13);
    }
    const double sq = 0.5 * (std::pow(traces[0].entries[s].error, 2) +
                             std::pow(traces[1].entries[s].error, 2));
    EXPECT_NEAR(at(stats, "sq_error", s).mean, sq, 1e-12 * std::max(1.0, sq));
  }
}

TEST(Ensemble, IndependentOfThreadCount) {
  const ConsistentSystem sys = random_consistent(12, 5, 1);
  const SvdFactorization f = svd(sys.a);
  SolveConfig cfg;
  cfg.seed = 5;
  cfg.max_iters = 30;
  cfg.trace_every = 1;
  EnsembleOptions one, four;
  one.threads = 1;
  four.threads = 4;
  one.track_oracle_gaps = four.track_oracle_gaps = true;
  const Vector x0(5, 0.0);
  const EnsembleStats a = ensemble_run(sys.a, sys.b, x0, cfg, 500, f, sys.true_x, one);
  const EnsembleStats b = ensemble_run(sys.a, sys.b, x0, cfg, 500, f, sys.true_x, four);
  std::ostringstream sa, sb;
  write_ensemble_csv(sa, a);
  write_ensemble_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Ensemble, DiagonalCoefficientAtTenSteps) {
  // diag(2,1,1), x0 - x = (1,1,1): the first coefficient survives k steps only
  // if row 1 is never drawn, probability (1/3)^k = (1 - 4/6)^k.
  const DenseMatrix a = diagonal(Vector{2, 1, 1});
  const SvdFactorization f = svd(a);
  const Vector true_x{0.5, -1, 2};
  const Vector b = matvec(a, true_x);
  const Vector x0 = axpy(1.0, Vector{1, 1, 1}, true_x);
  SolveConfig cfg;
  cfg.seed = 99;
  cfg.max_iters = 10;
  cfg.trace_every = 10;
  const EnsembleStats stats = ensemble_run(a, b, x0, cfg, 10000, f, true_x);
  const TheoremReport r = verify_theorem1_monte_carlo(a, f, stats, subtract(x0, true_x));
  EXPECT_TRUE(r.pass) << r.max_deviation;
  const auto& c1 = stats["coef_1"];
  EXPECT_EQ(stats.iters.back(), 10u);
  EXPECT_GE(c1.back().mean, 0.0);
  const double expected = predicted_coefficient(2.0, 6.0, 10, 1.0);
  EXPECT_NEAR(expected, std::pow(1.0 / 3.0, 10), 1e-18);
  EXPECT_TRUE(std::any_of(r.checks.begin(), r.checks.end(),
                          [&](const TheoremCheck& c) { return c.predicted == expected; }));
}

TEST(Ensemble, MeanSquaredErrorMatchesChainedOneStepOracle) {
  const ConsistentSystem sys = random_consistent(8, 4, 21);
  const SvdFactorization f = svd(sys.a);
  const Vector x0(4, 0.0);
  const Vector e0 = subtract(x0, sys.true_x);
  SolveConfig cfg;
  cfg.seed = 3;
  cfg.max_iters = 20;
  cfg.trace_every = 1;
  EnsembleOptions opts;
  opts.track_oracle_gaps = true;
  const EnsembleStats stats =
      ensemble_run(sys.a, sys.b, x0, cfg, 10000, f, sys.true_x, opts);
  const TheoremReport r2 = verify_theorem2_monte_carlo(sys.a, stats, e0);
  EXPECT_TRUE(r2.pass) << r2.max_deviation;
  const TheoremReport r3 = verify_theorem3_monte_carlo(stats);
  EXPECT_TRUE(r3.pass) << r3.max_deviation;
  EXPECT_EQ(stats.skipped_zero, 0u);
  // Contraction quantity is a ratio of consecutive squared errors in [0, 1].
  for (const Summary& s : stats["contraction"]) {
    if (s.count == 0) continue;
    EXPECT_GE(s.mean, 0.0);
    EXPECT_LE(s.mean, 1.0);
  }
}

TEST(Ensemble, GapsUnbiasedWhenIteratesHitZero) {
  // Orthogonal rows zero coordinates exactly; a step that lands on e = 0 must
  // still count toward the squared-error gap.
  const DenseMatrix a = diagonal(Vector{2, 1, 1});
  const SvdFactorization f = svd(a);
  const Vector zeros(3, 0.0);
  const Vector e0{1, 1, 1};
  SolveConfig cfg;
  cfg.seed = 12;
  cfg.max_iters = 50;
  cfg.trace_every = 1;
  EnsembleOptions opts;
  opts.track_oracle_gaps = true;
  const EnsembleStats stats = ensemble_run(a, zeros, e0, cfg, 10000, f, zeros, opts);
  const TheoremReport r = verify_theorem2_monte_carlo(a, stats, e0);
  EXPECT_TRUE(r.pass) << r.max_deviation;
  EXPECT_EQ(stats["sq_error_gap"][1].count, 10000u);
  EXPECT_EQ(stats["contraction"][1].count, 10000u);
}

TEST(Ensemble, RatioSeparationDecaysGeometrically) {
  // Pre-convergence: the large-sigma coefficient dies faster, so the mean
  // ratio |c_1| / |c_3| shrinks by roughly the factor ratio per step.
  const DenseMatrix a = diagonal(Vector{3, 2, 1});
  const SvdFactorization f = svd(a);
  const Vector zeros(3, 0.0);
  const Vector x0{1, 1, 1};
  SolveConfig cfg;
  cfg.seed = 8;
  cfg.max_iters = 4;
  cfg.trace_every = 1;
  const EnsembleStats stats = ensemble_run(a, zeros, x0, cfg, 20000, f, zeros);
  double prev = INFINITY;
  for (std::size_t s = 0; s < stats.iters.size(); ++s) {
    const double ratio = std::abs(stats["coef_1"][s].mean) / std::abs(stats["coef_3"][s].mean);
    EXPECT_LT(ratio, prev);
    prev = ratio;
  }
  const double frob = 14.0;
  const double expected_last = std::pow((1 - 9 / frob) / (1 - 1 / frob), 4.0);
  EXPECT_NEAR(prev, expected_last, 0.25 * expected_last);
}

TEST(Ensemble, Errors) {
  const DenseMatrix a = DenseMatrix::identity(2);
  const SvdFactorization f = svd(a);
  SolveConfig cfg;
  const Vector z(2, 0.0);
  EXPECT_THROW(ensemble_run(a, z, z, cfg, 1, f, z), DomainError);
  EXPECT_THROW(ensemble_run(a, Vector{1, 1}, z, cfg, 10, f, z), DomainError);
  EXPECT_THROW(ensemble_run(a, z, Vector(3, 0.0), cfg, 10, f, z), DimensionError);
  const EnsembleStats s = ensemble_run(a, z, Vector{1, 1}, cfg, 10, f, z);
  EXPECT_THROW(s["nope"], DomainError);
}

TEST(Ensemble, ZeroIteratesAreSkippedAndCounted) {
  // Identity reaches e = 0 after both rows are drawn.
  const DenseMatrix a = DenseMatrix::identity(2);
  const SvdFactorization f = svd(a);
  const Vector z(2, 0.0);
  SolveConfig cfg;
  cfg.max_iters = 20;
  cfg.trace_every = 1;
  const EnsembleStats s = ensemble_run(a, z, Vector{1, 1}, cfg, 200, f, z);
  EXPECT_GT(s.skipped_zero, 0u);
  for (const Summary& v : s["overlap"]) EXPECT_LE(v.count, 200u);
}

TEST(MinimizeRayleigh, IdentityQuotientStaysOneUntilZero) {
  SolveConfig cfg;
  cfg.seed = 1;
  cfg.max_iters = 100;
  cfg.trace_every = 1;
  const IterateTrace t = minimize_rayleigh(DenseMatrix::identity(4), Vector(4, 1.0), cfg);
  ASSERT_TRUE(t.converged);
  for (std::size_t k = 0; k + 1 < t.entries.size(); ++k)
    EXPECT_DOUBLE_EQ(t.entries[k].rayleigh, 1.0);
  EXPECT_TRUE(std::isnan(t.entries.back().rayleigh));
  EXPECT_EQ(t.final_error, 0.0);
}

TEST(MinimizeRayleigh, RejectsZeroStart) {
  SolveConfig cfg;
  EXPECT_THROW(minimize_rayleigh(DenseMatrix::identity(2), Vector(2, 0.0), cfg), DomainError);
  EXPECT_THROW(minimize_rayleigh(DenseMatrix::identity(2), Vector(3, 1.0), cfg),
               DimensionError);
}

TEST(MinimizeRayleigh, FindsPlantedSmallSingularDirection) {
  const std::size_t n = 100;
  const DenseMatrix a = gaussian_shifted_duplicate(n, 100.0, 0.01, 7);
  const SvdFactorization f = svd(a);
  const double second = f.sigma[n - 2];
  int below_in_time = 0;
  std::vector<double> overlaps;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SolveConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = 10 * n;
    cfg.trace_every = 10;
    const IterateTrace t = minimize_rayleigh(a, Vector(n, 1.0), cfg, &f);
    for (const TraceEntry& e : t.entries) {
      if (e.iter <= 5 * n && e.rayleigh < second) {
        ++below_in_time;
        break;
      }
    }
    overlaps.push_back(t.entries.back().overlap);
  }
  EXPECT_GE(below_in_time, 8);
  std::sort(overlaps.begin(), overlaps.end());
  EXPECT_GE(0.5 * (overlaps[4] + overlaps[5]), 0.9);
}

TEST(DirectionFreezing, OverlapStaysNearOneAfterPlateau) {
  const std::size_t n = 100;
  const DenseMatrix a = gaussian_shifted_duplicate(n, 100.0, 0.01, 7);
  const SvdFactorization f = svd(a);
  const double frob = frobenius_norm_sq(a);
  const double second = f.sigma[n - 2];
  const Vector zeros(n, 0.0);
  SolveConfig cfg;
  cfg.seed = 4;
  cfg.max_iters = 15 * n;
  cfg.trace_every = 1;
  const EnsembleStats stats = ensemble_run(a, zeros, Vector(n, 1.0), cfg, 16, f, zeros);
  const auto& overlap = stats["overlap"];
  const double threshold = 1.0 - 2.0 * second * second / frob;
  for (std::size_t s = 10 * n; s < stats.iters.size(); ++s)
    EXPECT_GT(overlap[s].mean, threshold) << "k=" << stats.iters[s];
}

TEST(Probes, CoordinatesThenGaussian) {
  const std::vector<Vector> p = make_probes(3, 5, 1);
  ASSERT_EQ(p.size(), 8u);
  EXPECT_EQ(p[0], (Vector{1, 0, 0}));
  EXPECT_EQ(p[2], (Vector{0, 0, 1}));
  EXPECT_EQ(make_probes(3, 5, 1), p);
  EXPECT_NE(make_probes(3, 5, 2), p);
}
