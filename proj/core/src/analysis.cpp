#include "rk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "rk/errors.hpp"
#include "rk/matrix_io.hpp"
#include "rk/random.hpp"

namespace rk {

namespace {

// The m possible successors of y under one homogeneous projection step.
template <typename Visit>
void for_each_outcome(const DenseMatrix& a, std::span<const double> y, Visit&& visit) {
  if (y.size() != a.cols()) {
    throw DimensionError("probe has length " + std::to_string(y.size()) +
                         ", expected " + std::to_string(a.cols()));
  }
  const double frob = frobenius_norm_sq(a);
  Vector next(y.size());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    const double w = norm_sq(row);
    if (w == 0.0) throw ZeroRowError(i);
    std::copy(y.begin(), y.end(), next.begin());
    project_in_place(row, 0.0, w, next);
    visit(i, w / frob, std::span<const double>(next));
  }
}

}  // namespace

Vector singular_coefficients(const SvdFactorization& f, std::span<const double> e) {
  if (e.size() != f.v.rows()) {
    throw DimensionError("vector has length " + std::to_string(e.size()) +
                         ", expected " + std::to_string(f.v.rows()));
  }
  return matvec_transposed(f.v, e);
}

double predicted_coefficient(double sigma_l, double frob_sq, std::size_t k, double c0) {
  if (!(frob_sq > 0.0) || !(sigma_l >= 0.0)) {
    throw DomainError("need sigma >= 0 and ||A||_F^2 > 0");
  }
  const double ratio = sigma_l * sigma_l / frob_sq;
  if (ratio > 1.0 + 1e-12) {
    throw DomainError("sigma^2 exceeds ||A||_F^2");
  }
  const double factor = ratio >= 1.0 ? 0.0 : 1.0 - ratio;
  return std::pow(factor, static_cast<double>(k)) * c0;
}

double theorem1_one_step_oracle(const DenseMatrix& a, const SvdFactorization& f,
                                std::span<const double> y, std::size_t l) {
  if (l >= f.sigma.size()) throw DimensionError("singular index out of range");
  const Vector vl = f.right_vector(l);
  double expectation = 0.0;
  for_each_outcome(a, y, [&](std::size_t, double p, std::span<const double> next) {
    expectation += p * dot(next, vl);
  });
  return expectation;
}

double contraction_factor(const DenseMatrix& a, std::span<const double> y) {
  const double ny = norm_sq(y);
  if (ny == 0.0) throw DomainError("contraction_factor: zero vector");
  return 1.0 - norm_sq(matvec(a, y)) / (frobenius_norm_sq(a) * ny);
}

OneStepMoments theorem2_one_step_moments(const DenseMatrix& a, std::span<const double> y) {
  double mean = 0.0, second = 0.0;
  for_each_outcome(a, y, [&](std::size_t, double p, std::span<const double> next) {
    const double v = norm_sq(next);
    mean += p * v;
    second += p * v * v;
  });
  return {mean, std::max(second - mean * mean, 0.0)};
}

double theorem2_one_step_oracle(const DenseMatrix& a, std::span<const double> y) {
  return theorem2_one_step_moments(a, y).mean;
}

OneStepMoments theorem3_one_step_moments(const DenseMatrix& a, std::span<const double> y) {
  const double ny = norm2(y);
  if (ny == 0.0) throw DomainError("overlap oracle: zero vector");
  double mean = 0.0, second = 0.0;
  for_each_outcome(a, y, [&](std::size_t i, double p, std::span<const double> next) {
    const double nn = norm2(next);
    if (nn <= 1e-13 * ny) throw HypothesisError(i);
    const double overlap = dot(y, next) / (ny * nn);
    const double v = overlap * overlap;
    mean += p * v;
    second += p * v * v;
  });
  return {mean, std::max(second - mean * mean, 0.0)};
}

double theorem3_one_step_oracle(const DenseMatrix& a, std::span<const double> y) {
  return theorem3_one_step_moments(a, y).mean;
}

std::vector<DenseMatrix> second_moments(const DenseMatrix& a,
                                        std::span<const double> e0,
                                        std::size_t steps) {
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  if (e0.size() != n) throw DimensionError("e0 length does not match matrix");
  const double frob = frobenius_norm_sq(a);
  const Vector w = row_norms_sq(a);
  for (std::size_t i = 0; i < m; ++i)
    if (w[i] == 0.0) throw ZeroRowError(i);

  // Gram matrix A^T A.
  DenseMatrix gram(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = a.row(i);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) gram(p, q) += r[p] * r[q];
  }

  DenseMatrix s(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) s(p, q) = e0[p] * e0[q];

  std::vector<DenseMatrix> out;
  out.reserve(steps + 1);
  out.push_back(s);
  // P S P = S - (S a a^T + a a^T S)/w + (a^T S a) a a^T / w^2, weighted by w/F.
  for (std::size_t k = 0; k < steps; ++k) {
    const DenseMatrix sg = matmul(s, gram);
    DenseMatrix next(n, n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        next(p, q) = s(p, q) - (sg(p, q) + sg(q, p)) / frob;
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = a.row(i);
      const Vector sa = matvec(s, r);
      const double quad = dot(r, sa) / (w[i] * frob);
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) next(p, q) += quad * r[p] * r[q];
    }
    s = std::move(next);
    out.push_back(s);
  }
  return out;
}

Vector expected_sq_error(const DenseMatrix& a, std::span<const double> e0,
                         std::size_t steps) {
  Vector out;
  out.reserve(steps + 1);
  for (const DenseMatrix& s : second_moments(a, e0, steps)) {
    double t = 0.0;
    for (std::size_t p = 0; p < s.rows(); ++p) t += s(p, p);
    out.push_back(t);
  }
  return out;
}

Vector expected_fourth_power_error(const DenseMatrix& a, std::span<const double> e0,
                                  std::size_t steps) {
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  if (e0.size() != n) throw DimensionError("e0 length does not match matrix");
  if (n > kMaxFourthMomentDim) {
    throw DomainError("fourth moments need n <= " + std::to_string(kMaxFourthMomentDim));
  }
  const double frob = frobenius_norm_sq(a);
  const Vector w = row_norms_sq(a);
  for (std::size_t i = 0; i < m; ++i)
    if (w[i] == 0.0) throw ZeroRowError(i);

  const std::size_t n2 = n * n;
  const std::size_t size = n2 * n2;
  // T = E[e (x) e (x) e (x) e], flattened with the last mode fastest.
  Vector t(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t r = idx;
    double v = 1.0;
    for (int d = 0; d < 4; ++d) {
      v *= e0[r % n];
      r /= n;
    }
    t[idx] = v;
  }
  const auto contract = [&](const Vector& x) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) sum += x[(j * n + j) * n2 + l * n + l];
    return sum;
  };

  Vector out;
  out.reserve(steps + 1);
  out.push_back(contract(t));
  Vector next(size), work(size);
  Vector unit(n);
  for (std::size_t k = 0; k < steps; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = a.row(i);
      const double norm = std::sqrt(w[i]);
      for (std::size_t j = 0; j < n; ++j) unit[j] = r[j] / norm;
      work = t;
      // Apply I - u u^T along each mode in turn.
      for (std::size_t stride = 1; stride < size; stride *= n) {
        for (std::size_t base = 0; base < size; ++base) {
          if ((base / stride) % n != 0) continue;
          double proj = 0.0;
          for (std::size_t j = 0; j < n; ++j) proj += unit[j] * work[base + j * stride];
          for (std::size_t j = 0; j < n; ++j) work[base + j * stride] -= unit[j] * proj;
        }
      }
      const double p = w[i] / frob;
      for (std::size_t idx = 0; idx < size; ++idx) next[idx] += p * work[idx];
    }
    t.swap(next);
    out.push_back(contract(t));
  }
  return out;
}

double worst_case_rate(const SvdFactorization& f, double frob_sq) {
  const double sn = f.smallest();
  return 1.0 - sn * sn / frob_sq;
}

IterateTrace minimize_rayleigh(const DenseMatrix& a, std::span<const double> x0,
                               const SolveConfig& cfg, const SvdFactorization* f) {
  if (x0.size() != a.cols()) {
    throw DimensionError("x0 has length " + std::to_string(x0.size()) +
                         ", expected " + std::to_string(a.cols()));
  }
  if (norm_sq(x0) == 0.0) {
    throw DomainError("x0 = 0 is a fixed point of the homogeneous iteration");
  }
  const Vector zeros_b(a.rows(), 0.0);
  const Vector zeros_x(a.cols(), 0.0);
  return solve(a, zeros_b, x0, cfg, std::span<const double>(zeros_x), f);
}

void write_rayleigh_csv(std::ostream& out, const IterateTrace& trace) {
  out << "iter,rayleigh,overlap_vn\n";
  for (const TraceEntry& e : trace.entries) {
    out << e.iter << ',' << format_scalar(e.rayleigh) << ','
        << format_scalar(e.overlap) << '\n';
  }
}

std::vector<Vector> make_probes(std::size_t n, std::size_t random_count,
                                std::uint64_t seed) {
  std::vector<Vector> probes;
  probes.reserve(n + random_count);
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    probes.push_back(std::move(e));
  }
  Rng rng(seed);
  for (std::size_t t = 0; t < random_count; ++t) {
    Vector y(n);
    for (double& v : y) v = rng.normal();
    probes.push_back(std::move(y));
  }
  return probes;
}

}  // namespace rk
