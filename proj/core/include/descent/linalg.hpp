#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace descent {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense complex matrix, column-major. Columns are the unit of work for the
// Jacobi SVD, so they are kept contiguous.
class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols);
  // `entries` is column-major; every entry must be finite.
  ComplexMatrix(std::size_t rows, std::size_t cols, ComplexVector entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix from_columns(std::span<const ComplexVector> columns);
  static ComplexMatrix from_rows(std::size_t rows, std::size_t cols,
                                 std::initializer_list<Complex> row_major);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<Complex> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const Complex> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  ComplexVector row(std::size_t i) const;

  std::span<const Complex> entries() const noexcept { return data_; }
  bool all_finite() const noexcept;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  ComplexVector data_;
};

// Thin SVD: m = sum_k sigma_k u_k v_k^H over r = min(rows, cols) terms.
struct SvdFactorization {
  std::vector<double> singular_values;  // descending
  ComplexMatrix left_vectors;           // rows x r
  ComplexMatrix right_vectors;          // cols x r
  std::size_t rank = 0;                 // count of sigma_k > rank_tolerance
  double rank_tolerance = 0.0;
  std::size_t sweeps = 0;

  std::size_t rows() const noexcept { return left_vectors.rows(); }
  std::size_t cols() const noexcept { return right_vectors.rows(); }
  std::size_t size() const noexcept { return singular_values.size(); }
  double sigma_max() const noexcept { return singular_values.empty() ? 0.0 : singular_values.front(); }
  double sigma_min() const noexcept { return singular_values.empty() ? 0.0 : singular_values.back(); }
  std::span<const Complex> u(std::size_t k) const { return left_vectors.column(k); }
  std::span<const Complex> v(std::size_t k) const { return right_vectors.column(k); }
};

struct SvdOptions {
  // Defaults to max(rows, cols) * eps * sigma_1.
  std::optional<double> rank_tolerance;
  std::size_t max_sweeps = 60;
};

// One-sided (Hestenes) Jacobi SVD with cyclic sweeps. Output is deterministic
// for identical input: the first nonzero entry of each right singular vector
// is real and nonnegative.
SvdFactorization svd(const ComplexMatrix& m, const SvdOptions& options = {});

double default_rank_tolerance(std::size_t rows, std::size_t cols, double sigma_max);

// sum_{k < rank} (1 / sigma_k) v_k (u_k^H rhs)
ComplexVector pseudo_inverse_apply(const SvdFactorization& f, std::span<const Complex> rhs);

double frobenius_norm(const ComplexMatrix& m);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector matvec(const ComplexMatrix& a, std::span<const Complex> x);
ComplexMatrix hermitian_transpose(const ComplexMatrix& m);
ComplexMatrix append_column(const ComplexMatrix& m, std::span<const Complex> col);

// Hermitian inner product a^H b.
Complex dot(std::span<const Complex> a, std::span<const Complex> b);
double norm(std::span<const Complex> x);
double norm_squared(std::span<const Complex> x);
ComplexVector subtract(std::span<const Complex> a, std::span<const Complex> b);

std::string shape_string(std::size_t rows, std::size_t cols);

}  // namespace descent
