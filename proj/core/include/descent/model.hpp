#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "descent/linalg.hpp"
#include "descent/rng.hpp"

namespace descent {

// Basis frequency numerator/denominator in cycles per sample. Kept exact so
// that set membership between frequency grids is integer arithmetic.
struct Frequency {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend bool same_value(const Frequency& a, const Frequency& b) noexcept {
    return a.numerator * b.denominator == b.numerator * a.denominator;
  }
  friend bool operator==(const Frequency&, const Frequency&) = default;
};

// exp(j 2 pi f x), with the phase reduced modulo one cycle before scaling.
Complex unit_phasor(const Frequency& f, double x);

enum class OrderingKind { linear, optimal, custom };

std::string_view to_string(OrderingKind kind);

// Ordered basis frequencies; frequency i defines column i of the regression
// matrix.
class ModelStructure {
 public:
  // Validates: 1 <= order <= n_max, every frequency in [0, 1), no duplicates.
  ModelStructure(std::vector<Frequency> frequencies, OrderingKind kind, std::size_t n_max);

  std::size_t order() const noexcept { return frequencies_.size(); }
  std::size_t n_max() const noexcept { return n_max_; }
  OrderingKind kind() const noexcept { return kind_; }
  std::span<const Frequency> frequencies() const noexcept { return frequencies_; }

  // Row vector phi(x) = [exp(j 2 pi f_1 x), ..., exp(j 2 pi f_n x)].
  ComplexVector basis_row(double x) const;

 private:
  std::vector<Frequency> frequencies_;
  OrderingKind kind_;
  std::size_t n_max_;
};

// Frequencies {k / n_max}, k = 0..n-1.
ModelStructure build_linear(std::size_t n, std::size_t n_max);

// {k / N} for the first min(n, N) entries; beyond N, continues with the
// ascending grid {k / n_max} with every member of {k / N} removed.
ModelStructure build_optimal(std::size_t n, std::size_t N, std::size_t n_max);

ModelStructure build_custom(std::vector<Frequency> frequencies, std::size_t n_max);

// Entry (t, i) = exp(j 2 pi f_i x(t)).
ComplexMatrix regression_matrix(const ModelStructure& s, std::span<const double> inputs);

struct Dataset {
  std::vector<double> inputs;
  ComplexVector outputs;

  std::size_t size() const noexcept { return inputs.size(); }
};

enum class GeneratorKind { lin, opt };

std::string_view to_string(GeneratorKind kind);

struct DataGenerator {
  static constexpr std::size_t kTerms = 10;

  std::array<Complex, kTerms> alpha{};
  GeneratorKind kind = GeneratorKind::lin;
  std::size_t n_max = 30;
  std::size_t N = 10;
  double noise_variance = 0.1;

  // Frequency of term k (0-based): k / n_max for lin, k / N for opt.
  Frequency frequency(std::size_t k) const;
};

// Draws alpha_k i.i.d. from the unit-variance circular complex Gaussian.
std::array<Complex, DataGenerator::kTerms> draw_alpha(Rng& rng);

Complex evaluate_f0(const DataGenerator& g, double x);
ComplexVector evaluate_f0(const DataGenerator& g, std::span<const double> xs);

// y(t) = f0(x(t)) + z(t), z circular complex Gaussian with E|z|^2 = noise_variance.
// A zero noise variance consumes no random numbers.
Dataset generate_dataset(const DataGenerator& g, std::span<const double> inputs, Rng& rng);

// Sample times 0, 1, ..., count - 1.
std::vector<double> sample_times(std::size_t count);

}  // namespace descent
