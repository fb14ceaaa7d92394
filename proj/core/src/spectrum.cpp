#include "descent/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace descent {

StructureBuilder linear_family(std::size_t n_max) {
  return [n_max](std::size_t n) { return build_linear(n, n_max); };
}

StructureBuilder optimal_family(std::size_t N, std::size_t n_max) {
  return [N, n_max](std::size_t n) { return build_optimal(n, N, n_max); };
}

std::size_t SpectrumSweep::peak_order() const {
  if (orders.empty()) throw std::logic_error("peak_order: empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < inv_sigma_min.size(); ++i) {
    if (inv_sigma_min[i] > inv_sigma_min[best]) best = i;
  }
  return orders[best];
}

SpectrumSweep sweep_spectrum(const StructureBuilder& builder, std::span<const double> inputs,
                             std::size_t n_max, const std::optional<DataGenerator>& f0) {
  SpectrumSweep sweep;
  std::optional<ComplexVector> f0_values;
  if (f0) {
    f0_values = evaluate_f0(*f0, inputs);
    sweep.theta_star_norm.emplace();
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    const auto s = builder(n);
    if (s.order() != n) {
      throw std::invalid_argument("sweep_spectrum: builder returned order " +
                                  std::to_string(s.order()) + " for n = " + std::to_string(n));
    }
    const auto f = svd(regression_matrix(s, inputs));
    const double smin = f.sigma_min();
    sweep.orders.push_back(n);
    sweep.sigma_min.push_back(smin);
    sweep.inv_sigma_min.push_back(smin > 0.0 ? 1.0 / smin
                                             : std::numeric_limits<double>::infinity());
    sweep.rank_deficient.push_back(f.rank < f.size());
    if (f0_values) sweep.theta_star_norm->push_back(norm(pseudo_inverse_apply(f, *f0_values)));
  }
  return sweep;
}

bool InterlacingVerdict::holds() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

std::optional<InterlacingCheck> InterlacingVerdict::first_violation() const {
  for (const auto& c : checks) {
    if (!c.holds) return c;
  }
  return std::nullopt;
}

InterlacingVerdict verify_interlacing(const ComplexMatrix& phi, std::span<const Complex> new_column,
                                      double slack_factor) {
  const auto extended = append_column(phi, new_column);
  const auto before = svd(phi).singular_values;
  const auto after = svd(extended).singular_values;

  const std::size_t N = phi.rows();
  const std::size_t n = phi.cols();
  InterlacingVerdict v{.before = before,
                       .after = after,
                       .underparametrized = n < N,
                       .slack = slack_factor * before.front(),
                       .checks = {}};

  auto add = [&](bool bar_first, std::size_t larger_idx, std::size_t smaller_idx) {
    InterlacingCheck c;
    const auto& big = bar_first ? after : before;
    const auto& small = bar_first ? before : after;
    c.larger = std::string(bar_first ? "sigma_bar_" : "sigma_") + std::to_string(larger_idx + 1);
    c.smaller = std::string(bar_first ? "sigma_" : "sigma_bar_") + std::to_string(smaller_idx + 1);
    c.larger_value = big[larger_idx];
    c.smaller_value = small[smaller_idx];
    c.holds = c.larger_value - c.smaller_value >= -v.slack;
    v.checks.push_back(std::move(c));
  };

  if (n < N) {
    // sigma_bar_1 >= sigma_1 >= sigma_bar_2 >= ... >= sigma_n >= sigma_bar_{n+1}
    for (std::size_t k = 0; k < n; ++k) {
      add(true, k, k);
      add(false, k, k + 1);
    }
  } else {
    // sigma_bar_1 >= sigma_1 >= sigma_bar_2 >= ... >= sigma_bar_N >= sigma_N
    for (std::size_t k = 0; k < N; ++k) {
      add(true, k, k);
      if (k + 1 < N) add(false, k, k + 1);
    }
  }
  return v;
}

MonotonicityVerdict check_sigma_min_monotonicity(const SpectrumSweep& sweep, std::size_t N,
                                                 double tol) {
  MonotonicityVerdict verdict;
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
    const std::size_t n = sweep.orders[i];
    const double cur = sweep.sigma_min[i];
    const double next = sweep.sigma_min[i + 1];
    bool ok = true;
    if (n + 1 <= N) {
      ok = next <= cur + tol;
    } else if (n >= N) {
      ok = next >= cur - tol;
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "sigma_min(" << n + 1 << ") = " << next << " vs sigma_min(" << n << ") = " << cur
          << (n < N ? ": increased below N" : ": decreased at or above N");
      return {false, n, msg.str()};
    }
  }
  return verdict;
}

NormTrendReport theta_star_norm_trend(const SpectrumSweep& sweep) {
  if (!sweep.theta_star_norm) {
    throw std::invalid_argument("theta_star_norm_trend: sweep was computed without f0");
  }
  NormTrendReport report{.orders = sweep.orders, .norms = *sweep.theta_star_norm,
                         .decreasing_ranges = {}};
  const auto& v = report.norms;
  std::size_t i = 0;
  while (i + 1 < v.size()) {
    if (v[i + 1] < v[i]) {
      std::size_t j = i + 1;
      while (j + 1 < v.size() && v[j + 1] < v[j]) ++j;
      report.decreasing_ranges.emplace_back(report.orders[i], report.orders[j]);
      i = j;
    } else {
      ++i;
    }
  }
  return report;
}

}  // namespace descent
