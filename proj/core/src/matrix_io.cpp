#include "rk/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rk/errors.hpp"

namespace rk {

namespace {

double parse_scalar(const std::string& token) {
  // strtod accepts the full decimal grammar including exponents and "nan".
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size()) {
    throw IoError("malformed scalar '" + token + "'");
  }
  return v;
}

std::size_t parse_dim(const std::string& token) {
  std::size_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || v == 0) {
    throw IoError("malformed dimension '" + token + "'");
  }
  return v;
}

}  // namespace

std::string format_scalar(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

DenseMatrix read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw IoError("missing 'm n' header");
  std::istringstream hs(header);
  std::string mt, nt, extra;
  if (!(hs >> mt >> nt) || (hs >> extra)) {
    throw IoError("header must be 'm n', got '" + header + "'");
  }
  const std::size_t m = parse_dim(mt);
  const std::size_t n = parse_dim(nt);

  std::vector<double> entries;
  entries.reserve(m * n);
  std::string line;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(in, line)) {
      throw IoError("expected " + std::to_string(m) + " rows, got " +
                    std::to_string(i));
    }
    std::istringstream ls(line);
    std::string tok;
    std::size_t count = 0;
    while (ls >> tok) {
      entries.push_back(parse_scalar(tok));
      ++count;
    }
    if (count != n) {
      throw IoError("row " + std::to_string(i + 1) + " has " +
                    std::to_string(count) + " entries, expected " +
                    std::to_string(n));
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw IoError("trailing data after " + std::to_string(m) + " rows");
    }
  }
  try {
    return DenseMatrix(m, n, std::move(entries));
  } catch (const DomainError& e) {
    throw IoError(e.what());
  }
}

void write_matrix(std::ostream& out, const DenseMatrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ' ';
      out << format_scalar(a(i, j));
    }
    out << '\n';
  }
}

Vector read_vector(std::istream& in) {
  const DenseMatrix a = read_matrix(in);
  if (a.cols() != 1 && a.rows() != 1) {
    throw IoError("vector file must be n x 1 or 1 x n, got " +
                  std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  return Vector(a.data().begin(), a.data().end());
}

void write_vector(std::ostream& out, const Vector& v) {
  write_matrix(out, DenseMatrix(v.size(), 1, v));
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return read_matrix(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_matrix(out, a);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Vector read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return read_vector(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_vector_file(const std::filesystem::path& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_vector(out, v);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace rk
