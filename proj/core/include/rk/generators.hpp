#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "rk/linalg.hpp"

namespace rk {

enum class GeneratorKind { GaussianShiftedDuplicate, RandomConsistent, Diagonal };

/// Parses "gaussian_shifted_duplicate" (alias "planted"), "random_consistent"
/// (alias "consistent") and "diagonal". Throws DomainError otherwise.
GeneratorKind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorKind kind);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::GaussianShiftedDuplicate;
  std::size_t n = 100;
  std::size_t m = 0;  // random_consistent only
  double shift = 100.0;
  double perturb = 0.01;
  std::uint64_t seed = 0;
  Vector entries;  // diagonal only
};

struct ConsistentSystem {
  DenseMatrix a;
  Vector true_x;
  Vector b;
};

struct GeneratedSystem {
  DenseMatrix a;
  std::optional<Vector> true_x;
  std::optional<Vector> b;
};

/// n x n matrix with iid standard normal entries (Box-Muller, row-major fill
/// order) plus `shift` on the diagonal; then row n is replaced by row n-1 plus
/// `perturb` in every entry. The near-duplicate pair plants one tiny singular
/// value. Throws DomainError for n < 2.
DenseMatrix gaussian_shifted_duplicate(std::size_t n, double shift, double perturb,
                                       std::uint64_t seed);

/// Gaussian A (m x n), Gaussian true_x, b = A true_x. Draws that are rank
/// deficient (sigma_n <= 1e-12 sigma_1) or contain a zero row are redrawn with
/// seed mix_seed(seed, attempt), at most 10 retries. Throws DomainError unless
/// m >= n >= 1; RankDeficientError when retries run out.
ConsistentSystem random_consistent(std::size_t m, std::size_t n, std::uint64_t seed);

/// Square diagonal matrix. Throws DomainError on a zero entry.
DenseMatrix diagonal(std::span<const double> entries);

GeneratedSystem generate(const GeneratorSpec& spec);

}  // namespace rk
