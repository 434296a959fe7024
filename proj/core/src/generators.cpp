#include "rk/generators.hpp"

#include "rk/errors.hpp"
#include "rk/random.hpp"

namespace rk {

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "gaussian_shifted_duplicate" || name == "planted")
    return GeneratorKind::GaussianShiftedDuplicate;
  if (name == "random_consistent" || name == "consistent")
    return GeneratorKind::RandomConsistent;
  if (name == "diagonal") return GeneratorKind::Diagonal;
  throw DomainError("unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::GaussianShiftedDuplicate:
      return "gaussian_shifted_duplicate";
    case GeneratorKind::RandomConsistent:
      return "random_consistent";
    case GeneratorKind::Diagonal:
      return "diagonal";
  }
  return "unknown";
}

DenseMatrix gaussian_shifted_duplicate(std::size_t n, double shift, double perturb,
                                       std::uint64_t seed) {
  if (n < 2) throw DomainError("gaussian_shifted_duplicate needs n >= 2");
  Rng rng(seed);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
  for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = a(n - 2, j) + perturb;
  return a;
}

ConsistentSystem random_consistent(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (n == 0 || m < n) {
    throw DomainError("random_consistent needs m >= n >= 1, got m=" +
                      std::to_string(m) + " n=" + std::to_string(n));
  }
  constexpr int kMaxRetries = 10;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    Rng rng(attempt == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
    Vector x(n);
    for (double& v : x) v = rng.normal();

    bool zero_row = false;
    for (std::size_t i = 0; i < m && !zero_row; ++i) zero_row = norm_sq(a.row(i)) == 0.0;
    if (zero_row || !has_full_column_rank(svd(a))) continue;

    Vector b = matvec(a, x);
    return {std::move(a), std::move(x), std::move(b)};
  }
  throw RankDeficientError("random_consistent: no full-rank draw after " +
                           std::to_string(kMaxRetries) + " retries");
}

DenseMatrix diagonal(std::span<const double> entries) {
  if (entries.empty()) throw DomainError("diagonal needs at least one entry");
  const std::size_t n = entries.size();
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i] == 0.0) {
      throw DomainError("diagonal entry " + std::to_string(i + 1) + " is zero");
    }
    a(i, i) = entries[i];
  }
  return a;
}

GeneratedSystem generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::GaussianShiftedDuplicate:
      return {gaussian_shifted_duplicate(spec.n, spec.shift, spec.perturb, spec.seed),
              std::nullopt, std::nullopt};
    case GeneratorKind::RandomConsistent: {
      ConsistentSystem s = random_consistent(spec.m, spec.n, spec.seed);
      return {std::move(s.a), std::move(s.true_x), std::move(s.b)};
    }
    case GeneratorKind::Diagonal:
      return {diagonal(spec.entries), std::nullopt, std::nullopt};
  }
  throw DomainError("unknown generator kind");
}

}  // namespace rk
