#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "descent/estimators.hpp"
#include "descent/model.hpp"
#include "descent/rng.hpp"
#include "descent/spectrum.hpp"

namespace descent {

enum class AlphaMode { fixed_per_case, resample_per_replicate };

std::string_view to_string(AlphaMode mode);

struct ExperimentConfig {
  std::string case_id = "A";
  double epsilon = 0.5;
  GeneratorKind generator_kind = GeneratorKind::lin;
  std::size_t N = 10;
  std::size_t n_max = 30;
  double noise_variance = 0.1;
  std::size_t replicates = 500;
  std::uint64_t base_seed = 1;
  Estimator estimator = Estimator::min_norm();
  AlphaMode alpha_mode = AlphaMode::fixed_per_case;
  // Keep per-replicate noisy NMSE values in the result.
  bool keep_replicates = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Table presets: A (eps 0.5, lin), B (eps 0, lin), C (eps 0.5, opt), D (eps 0, opt).
ExperimentConfig preset(std::string_view case_id);

// Throws std::invalid_argument describing the first problem found.
void validate(const ExperimentConfig& cfg);

struct OrderResult {
  std::size_t order = 0;
  double nmse_noisy_mean = 0.0;
  double nmse_noisefree_mean = 0.0;
  double nmse_noisy_median = 0.0;  // diagnostic, not part of the CSV schema
  double inv_sigma_min = 0.0;
  double theta_star_norm = 0.0;
  std::optional<std::string> failure;
  std::vector<double> nmse_noisy_replicates;  // filled when keep_replicates
};

struct FamilyCurve {
  OrderingKind family = OrderingKind::linear;
  std::vector<OrderResult> orders;
  SpectrumSweep spectrum;

  const OrderResult& at(std::size_t n) const { return orders.at(n - 1); }
};

struct CaseResult {
  ExperimentConfig config;
  FamilyCurve linear;
  FamilyCurve optimal;

  const FamilyCurve& family(OrderingKind kind) const;
};

// sum |true - predicted|^2 / sum |true|^2.
double nmse(std::span<const Complex> true_values, std::span<const Complex> predicted);

// (eps, 1 + eps, ..., N - 1 + eps)
std::vector<double> test_grid(std::size_t N, double epsilon);

// Stream seed used for the case-level alpha draw (index 0) and for replicate
// r (index r + 1).
std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::size_t replicate);

// The data generating system used for a replicate. Under fixed_per_case every
// replicate shares the alpha drawn from stream index 0.
DataGenerator case_generator(const ExperimentConfig& cfg, std::size_t replicate = 0);

// Noisy training set of replicate r, on inputs 0..N-1.
Dataset replicate_dataset(const ExperimentConfig& cfg, std::size_t replicate);

CaseResult run_case(const ExperimentConfig& cfg);

struct DescentProfile {
  std::optional<std::size_t> peak_order;  // empty when the curve is flat
  bool descends_after_peak = false;
  double peak_value = 0.0;
  double final_value = 0.0;
};

// Peak of the noisy mean NMSE over 2 <= n <= n_max - 1, and whether the
// value at n_max is below it.
DescentProfile double_descent_profile(const FamilyCurve& curve);
DescentProfile double_descent_profile(std::span<const double> noisy_mean_by_order);

}  // namespace descent
