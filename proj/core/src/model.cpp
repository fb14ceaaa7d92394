#include "descent/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace descent {

Complex unit_phasor(const Frequency& f, double x) {
  double cycles = static_cast<double>(f.numerator) * x / static_cast<double>(f.denominator);
  cycles -= std::floor(cycles);
  const double angle = 2.0 * std::numbers::pi * cycles;
  return {std::cos(angle), std::sin(angle)};
}

std::string_view to_string(OrderingKind kind) {
  switch (kind) {
    case OrderingKind::linear: return "linear";
    case OrderingKind::optimal: return "optimal";
    case OrderingKind::custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(GeneratorKind kind) {
  return kind == GeneratorKind::lin ? "lin" : "opt";
}

ModelStructure::ModelStructure(std::vector<Frequency> frequencies, OrderingKind kind,
                               std::size_t n_max)
    : frequencies_(std::move(frequencies)), kind_(kind), n_max_(n_max) {
  const std::size_t n = frequencies_.size();
  if (n < 1 || n > n_max_) {
    throw std::invalid_argument("ModelStructure: order " + std::to_string(n) +
                                " outside [1, " + std::to_string(n_max_) + "]");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = frequencies_[i];
    if (f.denominator <= 0 || f.numerator < 0 || f.numerator >= f.denominator) {
      throw std::invalid_argument("ModelStructure: frequency " + std::to_string(f.numerator) +
                                  "/" + std::to_string(f.denominator) + " not in [0, 1)");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (same_value(frequencies_[j], f)) {
        throw std::invalid_argument("ModelStructure: duplicate frequency at positions " +
                                    std::to_string(j) + " and " + std::to_string(i));
      }
    }
  }
}

ComplexVector ModelStructure::basis_row(double x) const {
  ComplexVector row(frequencies_.size());
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = unit_phasor(frequencies_[i], x);
  return row;
}

namespace {

void check_order(std::size_t n, std::size_t n_max) {
  if (n < 1 || n > n_max) {
    throw std::invalid_argument("model order " + std::to_string(n) + " outside [1, " +
                                std::to_string(n_max) + "]");
  }
}

}  // namespace

ModelStructure build_linear(std::size_t n, std::size_t n_max) {
  check_order(n, n_max);
  std::vector<Frequency> freqs;
  freqs.reserve(n);
  const auto den = static_cast<std::int64_t>(n_max);
  for (std::size_t k = 0; k < n; ++k) freqs.push_back({static_cast<std::int64_t>(k), den});
  return ModelStructure(std::move(freqs), OrderingKind::linear, n_max);
}

ModelStructure build_optimal(std::size_t n, std::size_t N, std::size_t n_max) {
  check_order(n, n_max);
  if (N < 1 || N > n_max) {
    throw std::invalid_argument("build_optimal: N = " + std::to_string(N) +
                                " must satisfy 1 <= N <= n_max = " + std::to_string(n_max));
  }
  std::vector<Frequency> freqs;
  freqs.reserve(n);
  const auto coarse = static_cast<std::int64_t>(N);
  const auto fine = static_cast<std::int64_t>(n_max);
  for (std::int64_t k = 0; k < coarse && freqs.size() < n; ++k) freqs.push_back({k, coarse});
  // k / n_max equals some j / N exactly when k * N is a multiple of n_max.
  for (std::int64_t k = 0; k < fine && freqs.size() < n; ++k) {
    if ((k * coarse) % fine != 0) freqs.push_back({k, fine});
  }
  return ModelStructure(std::move(freqs), OrderingKind::optimal, n_max);
}

ModelStructure build_custom(std::vector<Frequency> frequencies, std::size_t n_max) {
  return ModelStructure(std::move(frequencies), OrderingKind::custom, n_max);
}

ComplexMatrix regression_matrix(const ModelStructure& s, std::span<const double> inputs) {
  if (inputs.empty()) throw DimensionError("regression_matrix: no inputs");
  ComplexMatrix phi(inputs.size(), s.order());
  for (std::size_t i = 0; i < s.order(); ++i) {
    const auto& f = s.frequencies()[i];
    for (std::size_t t = 0; t < inputs.size(); ++t) phi(t, i) = unit_phasor(f, inputs[t]);
  }
  return phi;
}

Frequency DataGenerator::frequency(std::size_t k) const {
  const std::size_t den = kind == GeneratorKind::lin ? n_max : N;
  return {static_cast<std::int64_t>(k), static_cast<std::int64_t>(den)};
}

std::array<Complex, DataGenerator::kTerms> draw_alpha(Rng& rng) {
  std::array<Complex, DataGenerator::kTerms> alpha{};
  for (auto& a : alpha) a = rng.circular_gaussian(1.0);
  return alpha;
}

Complex evaluate_f0(const DataGenerator& g, double x) {
  Complex sum{};
  for (std::size_t k = 0; k < DataGenerator::kTerms; ++k) {
    sum += g.alpha[k] * unit_phasor(g.frequency(k), x);
  }
  return sum;
}

ComplexVector evaluate_f0(const DataGenerator& g, std::span<const double> xs) {
  ComplexVector out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = evaluate_f0(g, xs[i]);
  return out;
}

Dataset generate_dataset(const DataGenerator& g, std::span<const double> inputs, Rng& rng) {
  if (g.noise_variance < 0.0) throw std::invalid_argument("generate_dataset: negative noise variance");
  Dataset d{.inputs = {inputs.begin(), inputs.end()}, .outputs = evaluate_f0(g, inputs)};
  if (g.noise_variance > 0.0) {
    for (auto& y : d.outputs) y += rng.circular_gaussian(g.noise_variance);
  }
  return d;
}

std::vector<double> sample_times(std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i);
  return t;
}

}  // namespace descent
