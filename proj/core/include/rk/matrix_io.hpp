#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rk/linalg.hpp"

namespace rk {

// Unreadable, unwritable or malformed file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text format: first line "m n", then m lines of n whitespace-separated
// decimal scalars. Vectors are stored as n x 1 matrices; 1 x n is accepted on
// read.

/// Shortest round-trip form is not attempted: always 17 significant digits.
std::string format_scalar(double x);

DenseMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const DenseMatrix& a);

Vector read_vector(std::istream& in);
void write_vector(std::ostream& out, const Vector& v);

DenseMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& a);
Vector read_vector_file(const std::filesystem::path& path);
void write_vector_file(const std::filesystem::path& path, const Vector& v);

}  // namespace rk
