#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "descent/linalg.hpp"
#include "descent/model.hpp"

namespace descent {

// Produces the structure of order n; must be nested (order n + 1 extends n).
using StructureBuilder = std::function<ModelStructure(std::size_t n)>;

StructureBuilder linear_family(std::size_t n_max);
StructureBuilder optimal_family(std::size_t N, std::size_t n_max);

struct SpectrumSweep {
  std::vector<std::size_t> orders;
  std::vector<double> sigma_min;
  std::vector<double> inv_sigma_min;
  std::vector<bool> rank_deficient;
  std::optional<std::vector<double>> theta_star_norm;  // min-norm |theta*| when f0 given

  std::size_t size() const noexcept { return orders.size(); }
  // Order with the largest 1/sigma_min; ties resolve to the lowest order.
  std::size_t peak_order() const;
};

// One SVD per order n = 1..n_max of regression_matrix(builder(n), inputs).
SpectrumSweep sweep_spectrum(const StructureBuilder& builder, std::span<const double> inputs,
                             std::size_t n_max,
                             const std::optional<DataGenerator>& f0 = std::nullopt);

struct InterlacingCheck {
  std::string larger;   // e.g. "sigma_bar_1"
  std::string smaller;  // e.g. "sigma_1"
  double larger_value = 0.0;
  double smaller_value = 0.0;
  bool holds = false;
};

struct InterlacingVerdict {
  std::vector<double> before;  // spectrum of Phi
  std::vector<double> after;   // spectrum of [Phi phi_new]
  bool underparametrized = false;  // n < N chain, otherwise n >= N chain
  double slack = 0.0;
  std::vector<InterlacingCheck> checks;

  bool holds() const;
  std::optional<InterlacingCheck> first_violation() const;
};

// Checks the singular value interlacing chain between Phi and Phi with one
// appended column. Each inequality a >= b passes when a - b >= -slack_factor * sigma_1.
InterlacingVerdict verify_interlacing(const ComplexMatrix& phi, std::span<const Complex> new_column,
                                      double slack_factor = 1e-9);

struct MonotonicityVerdict {
  bool holds = true;
  std::optional<std::size_t> first_violation;  // order n where n -> n + 1 breaks the rule
  std::string detail;
};

// sigma_min(n+1) <= sigma_min(n) + tol while n + 1 <= N, and
// sigma_min(n+1) >= sigma_min(n) - tol once n >= N.
MonotonicityVerdict check_sigma_min_monotonicity(const SpectrumSweep& sweep, std::size_t N,
                                                 double tol = 1e-9);

struct NormTrendReport {
  std::vector<std::size_t> orders;
  std::vector<double> norms;
  // Inclusive order ranges [first, last] over which |theta*| strictly decreases.
  std::vector<std::pair<std::size_t, std::size_t>> decreasing_ranges;
};

// Descriptive only; requires a sweep computed with f0.
NormTrendReport theta_star_norm_trend(const SpectrumSweep& sweep);

}  // namespace descent
