#include "descent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace descent {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

struct JacobiResult {
  ComplexMatrix columns;  // A * V, columns mutually orthogonal
  ComplexMatrix rotations;
  std::size_t sweeps;
};

// Orthogonalizes the columns of `a` in place by cyclic complex Givens
// rotations. Pairs are treated as converged once
// |a_i^H a_j| <= tol * |a_i| |a_j|.
JacobiResult one_sided_jacobi(ComplexMatrix a, std::size_t max_sweeps) {
  const std::size_t m = a.rows();
  const std::size_t c = a.cols();
  ComplexMatrix v = ComplexMatrix::identity(c);
  const double tol = std::sqrt(static_cast<double>(m)) * kEps;

  double worst = 0.0;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    worst = 0.0;
    for (std::size_t i = 0; i + 1 < c; ++i) {
      for (std::size_t j = i + 1; j < c; ++j) {
        auto ai = a.column(i);
        auto aj = a.column(j);
        const double alpha = norm_squared(ai);
        const double beta = norm_squared(aj);
        const Complex gamma = dot(ai, aj);
        const double mag = std::abs(gamma);
        if (mag == 0.0) continue;
        const double scale = std::sqrt(alpha) * std::sqrt(beta);
        worst = std::max(worst, mag / scale);
        if (mag <= tol * scale) continue;

        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * mag);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double cs = 1.0 / std::hypot(1.0, t);
        const double sn = cs * t;
        const Complex phase = std::conj(gamma / mag);

        for (std::size_t r = 0; r < m; ++r) {
          const Complex x = ai[r];
          const Complex y = aj[r] * phase;
          ai[r] = cs * x - sn * y;
          aj[r] = sn * x + cs * y;
        }
        auto vi = v.column(i);
        auto vj = v.column(j);
        for (std::size_t r = 0; r < c; ++r) {
          const Complex x = vi[r];
          const Complex y = vj[r] * phase;
          vi[r] = cs * x - sn * y;
          vj[r] = sn * x + cs * y;
        }
      }
    }
    if (!rotated) return {std::move(a), std::move(v), sweep + 1};
  }

  std::ostringstream msg;
  msg << "svd: one-sided Jacobi did not converge on a " << shape_string(m, c)
      << " matrix after " << max_sweeps << " sweeps; largest relative off-diagonal "
      << "inner product " << worst;
  throw ConvergenceError(msg.str());
}

// Fills columns flagged in `missing` with unit vectors orthogonal to every
// other column, using the standard basis as candidates.
void complete_orthonormal(ComplexMatrix& q, const std::vector<bool>& missing) {
  const std::size_t m = q.rows();
  std::size_t candidate = 0;
  for (std::size_t k = 0; k < q.cols(); ++k) {
    if (!missing[k]) continue;
    for (; candidate < m; ++candidate) {
      ComplexVector w(m, Complex{});
      w[candidate] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t l = 0; l < q.cols(); ++l) {
          if (l == k || (missing[l] && l > k)) continue;
          const Complex proj = dot(q.column(l), w);
          for (std::size_t r = 0; r < m; ++r) w[r] -= proj * q(r, l);
        }
      }
      const double len = norm(w);
      if (len > 0.5) {
        for (std::size_t r = 0; r < m; ++r) q(r, k) = w[r] / len;
        ++candidate;
        break;
      }
    }
  }
}

// Factorization of a matrix with rows >= cols.
SvdFactorization svd_tall(const ComplexMatrix& m, std::size_t max_sweeps) {
  auto [work, rot, sweeps] = one_sided_jacobi(m, max_sweeps);
  const std::size_t c = work.cols();

  std::vector<double> norms(c);
  for (std::size_t k = 0; k < c; ++k) norms[k] = norm(work.column(k));

  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  SvdFactorization f{
      .singular_values = std::vector<double>(c),
      .left_vectors = ComplexMatrix(m.rows(), c),
      .right_vectors = ComplexMatrix(c, c),
  };
  f.sweeps = sweeps;

  std::vector<bool> missing(c, false);
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t src = order[k];
    const double sigma = norms[src];
    f.singular_values[k] = sigma;
    auto dst_v = f.right_vectors.column(k);
    std::copy(rot.column(src).begin(), rot.column(src).end(), dst_v.begin());
    if (sigma > std::numeric_limits<double>::min()) {
      auto col = work.column(src);
      for (std::size_t r = 0; r < m.rows(); ++r) f.left_vectors(r, k) = col[r] / sigma;
    } else {
      f.singular_values[k] = 0.0;
      missing[k] = true;
    }
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) {
    complete_orthonormal(f.left_vectors, missing);
  }
  return f;
}

void fix_phase(SvdFactorization& f) {
  const double threshold = 64.0 * kEps;
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto vk = f.right_vectors.column(k);
    auto it = std::find_if(vk.begin(), vk.end(),
                           [&](const Complex& z) { return std::abs(z) > threshold; });
    if (it == vk.end()) continue;
    const Complex rot = std::conj(*it / std::abs(*it));
    for (auto& z : vk) z *= rot;
    *it = Complex(it->real(), 0.0);
    for (auto& z : f.left_vectors.column(k)) z *= rot;
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{}) {
  require(rows >= 1 && cols >= 1, "ComplexMatrix: dimensions must be at least 1x1, got " +
                                      shape_string(rows, cols));
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, ComplexVector entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(rows >= 1 && cols >= 1, "ComplexMatrix: dimensions must be at least 1x1, got " +
                                      shape_string(rows, cols));
  require(data_.size() == rows * cols, "ComplexMatrix: expected " +
                                           std::to_string(rows * cols) + " entries, got " +
                                           std::to_string(data_.size()));
  if (!all_finite()) throw std::invalid_argument("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const ComplexVector> columns) {
  require(!columns.empty(), "from_columns: no columns");
  const std::size_t rows = columns.front().size();
  ComplexVector data;
  data.reserve(rows * columns.size());
  for (const auto& col : columns) {
    require(col.size() == rows, "from_columns: ragged column lengths");
    data.insert(data.end(), col.begin(), col.end());
  }
  return ComplexMatrix(rows, columns.size(), std::move(data));
}

ComplexMatrix ComplexMatrix::from_rows(std::size_t rows, std::size_t cols,
                                       std::initializer_list<Complex> row_major) {
  require(row_major.size() == rows * cols, "from_rows: entry count does not match shape");
  ComplexMatrix m(rows, cols);
  auto it = row_major.begin();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = *it++;
  if (!m.all_finite()) throw std::invalid_argument("ComplexMatrix: non-finite entry");
  return m;
}

ComplexVector ComplexMatrix::row(std::size_t i) const {
  ComplexVector out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
  return out;
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double default_rank_tolerance(std::size_t rows, std::size_t cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * kEps * sigma_max;
}

SvdFactorization svd(const ComplexMatrix& m, const SvdOptions& options) {
  if (!m.all_finite()) {
    throw std::invalid_argument("svd: matrix " + shape_string(m.rows(), m.cols()) +
                                " has non-finite entries");
  }

  SvdFactorization f = [&] {
    if (m.rows() >= m.cols()) return svd_tall(m, options.max_sweeps);
    // Wide: factor m^H = U' S V'^H, so m = V' S U'^H.
    SvdFactorization t = svd_tall(hermitian_transpose(m), options.max_sweeps);
    std::swap(t.left_vectors, t.right_vectors);
    return t;
  }();

  fix_phase(f);
  f.rank_tolerance = options.rank_tolerance.value_or(
      default_rank_tolerance(m.rows(), m.cols(), f.sigma_max()));
  f.rank = static_cast<std::size_t>(
      std::count_if(f.singular_values.begin(), f.singular_values.end(),
                    [&](double s) { return s > f.rank_tolerance; }));
  return f;
}

ComplexVector pseudo_inverse_apply(const SvdFactorization& f, std::span<const Complex> rhs) {
  require(rhs.size() == f.rows(), "pseudo_inverse_apply: rhs has length " +
                                      std::to_string(rhs.size()) + ", expected " +
                                      std::to_string(f.rows()));
  ComplexVector out(f.cols(), Complex{});
  for (std::size_t k = 0; k < f.rank; ++k) {
    const Complex coeff = dot(f.u(k), rhs) / f.singular_values[k];
    auto vk = f.v(k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeff * vk[i];
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& m) { return norm(m.entries()); }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), "matmul: cannot multiply " + shape_string(a.rows(), a.cols()) +
                                    " by " + shape_string(b.rows(), b.cols()));
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto dst = out.column(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex bkj = b(k, j);
      auto ak = a.column(k);
      for (std::size_t i = 0; i < a.rows(); ++i) dst[i] += ak[i] * bkj;
    }
  }
  return out;
}

ComplexVector matvec(const ComplexMatrix& a, std::span<const Complex> x) {
  require(a.cols() == x.size(), "matvec: matrix " + shape_string(a.rows(), a.cols()) +
                                    " times vector of length " + std::to_string(x.size()));
  ComplexVector out(a.rows(), Complex{});
  for (std::size_t k = 0; k < a.cols(); ++k) {
    auto ak = a.column(k);
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] += ak[i] * x[k];
  }
  return out;
}

ComplexMatrix hermitian_transpose(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(j, i) = std::conj(m(i, j));
  return out;
}

ComplexMatrix append_column(const ComplexMatrix& m, std::span<const Complex> col) {
  require(col.size() == m.rows(), "append_column: column has length " +
                                      std::to_string(col.size()) + ", matrix has " +
                                      std::to_string(m.rows()) + " rows");
  ComplexVector data(m.entries().begin(), m.entries().end());
  data.insert(data.end(), col.begin(), col.end());
  return ComplexMatrix(m.rows(), m.cols() + 1, std::move(data));
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm_squared(std::span<const Complex> x) {
  double acc = 0.0;
  for (const auto& z : x) acc += std::norm(z);
  return acc;
}

double norm(std::span<const Complex> x) { return std::sqrt(norm_squared(x)); }

ComplexVector subtract(std::span<const Complex> a, std::span<const Complex> b) {
  require(a.size() == b.size(), "subtract: length mismatch");
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

std::string shape_string(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace descent
