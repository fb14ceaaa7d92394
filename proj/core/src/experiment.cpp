#include "descent/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace descent {

std::string_view to_string(AlphaMode mode) {
  return mode == AlphaMode::fixed_per_case ? "fixed_per_case" : "resample_per_replicate";
}

ExperimentConfig preset(std::string_view case_id) {
  ExperimentConfig cfg;
  cfg.case_id = std::string(case_id);
  if (case_id == "A") {
    cfg.epsilon = 0.5;
    cfg.generator_kind = GeneratorKind::lin;
  } else if (case_id == "B") {
    cfg.epsilon = 0.0;
    cfg.generator_kind = GeneratorKind::lin;
  } else if (case_id == "C") {
    cfg.epsilon = 0.5;
    cfg.generator_kind = GeneratorKind::opt;
  } else if (case_id == "D") {
    cfg.epsilon = 0.0;
    cfg.generator_kind = GeneratorKind::opt;
  } else {
    throw std::invalid_argument("unknown case id '" + std::string(case_id) +
                                "' (expected A, B, C or D)");
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (cfg.case_id.empty()) fail("case_id must not be empty");
  if (cfg.N < 1) fail("N must be at least 1");
  if (cfg.n_max < cfg.N) fail("n_max must be at least N");
  if (cfg.replicates < 1) fail("replicates must be at least 1");
  if (!(cfg.noise_variance >= 0.0) || !std::isfinite(cfg.noise_variance))
    fail("r_z must be a finite nonnegative number");
  if (!std::isfinite(cfg.epsilon)) fail("epsilon must be finite");
}

const FamilyCurve& CaseResult::family(OrderingKind kind) const {
  if (kind == OrderingKind::linear) return linear;
  if (kind == OrderingKind::optimal) return optimal;
  throw std::invalid_argument("CaseResult holds only the linear and optimal families");
}

double nmse(std::span<const Complex> true_values, std::span<const Complex> predicted) {
  if (true_values.size() != predicted.size()) {
    throw DimensionError("nmse: " + std::to_string(true_values.size()) + " true values vs " +
                         std::to_string(predicted.size()) + " predictions");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < true_values.size(); ++i) {
    num += std::norm(true_values[i] - predicted[i]);
    den += std::norm(true_values[i]);
  }
  if (!(den > 0.0)) throw std::domain_error("nmse: true values are all zero");
  return num / den;
}

std::vector<double> test_grid(std::size_t N, double epsilon) {
  std::vector<double> grid(N);
  for (std::size_t t = 0; t < N; ++t) grid[t] = static_cast<double>(t) + epsilon;
  return grid;
}

std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::size_t replicate) {
  return derive_stream_seed(cfg.base_seed, stream_tag(cfg.case_id), replicate + 1);
}

DataGenerator case_generator(const ExperimentConfig& cfg, std::size_t replicate) {
  DataGenerator g{.alpha = {}, .kind = cfg.generator_kind, .n_max = cfg.n_max, .N = cfg.N,
                  .noise_variance = cfg.noise_variance};
  if (cfg.alpha_mode == AlphaMode::fixed_per_case) {
    Rng rng(derive_stream_seed(cfg.base_seed, stream_tag(cfg.case_id), 0));
    g.alpha = draw_alpha(rng);
  } else {
    Rng rng(replicate_seed(cfg, replicate));
    g.alpha = draw_alpha(rng);
  }
  return g;
}

Dataset replicate_dataset(const ExperimentConfig& cfg, std::size_t replicate) {
  const auto g = case_generator(cfg, replicate);
  Rng rng(replicate_seed(cfg, replicate));
  // Under resampling the stream starts with this replicate's alpha draw.
  if (cfg.alpha_mode == AlphaMode::resample_per_replicate) draw_alpha(rng);
  return generate_dataset(g, sample_times(cfg.N), rng);
}

namespace {

struct PreparedOrder {
  std::optional<ModelStructure> structure;
  std::optional<SvdFactorization> factorization;
  std::optional<ComplexMatrix> test_matrix;
  std::optional<std::string> failure;
};

std::vector<PreparedOrder> prepare(const StructureBuilder& builder, std::size_t n_max,
                                   std::span<const double> inputs, std::span<const double> tests) {
  std::vector<PreparedOrder> out(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    auto& p = out[n - 1];
    p.structure = builder(n);
    p.test_matrix = regression_matrix(*p.structure, tests);
    try {
      p.factorization = svd(regression_matrix(*p.structure, inputs));
    } catch (const std::exception& e) {
      p.failure = e.what();
    }
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// Fits y and scores the predictions on the test grid; NaN if the order failed.
double score(const PreparedOrder& p, std::span<const Complex> y,
             std::span<const Complex> f0_test, const Estimator& est, double* theta_norm) {
  if (!p.factorization) return std::numeric_limits<double>::quiet_NaN();
  const auto theta = solve(*p.factorization, y, est);
  if (theta_norm) *theta_norm = norm(theta);
  return nmse(f0_test, matvec(*p.test_matrix, theta));
}

SpectrumSweep spectrum_from(const std::vector<PreparedOrder>& prepared,
                            const std::optional<ComplexVector>& f0_train) {
  SpectrumSweep sweep;
  if (f0_train) sweep.theta_star_norm.emplace();
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const auto& p = prepared[i];
    sweep.orders.push_back(i + 1);
    if (!p.factorization) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      sweep.sigma_min.push_back(nan);
      sweep.inv_sigma_min.push_back(nan);
      sweep.rank_deficient.push_back(true);
      if (f0_train) sweep.theta_star_norm->push_back(nan);
      continue;
    }
    const auto& f = *p.factorization;
    const double smin = f.sigma_min();
    sweep.sigma_min.push_back(smin);
    sweep.inv_sigma_min.push_back(smin > 0.0 ? 1.0 / smin
                                             : std::numeric_limits<double>::infinity());
    sweep.rank_deficient.push_back(f.rank < f.size());
    if (f0_train) sweep.theta_star_norm->push_back(norm(pseudo_inverse_apply(f, *f0_train)));
  }
  return sweep;
}

}  // namespace

CaseResult run_case(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto inputs = sample_times(cfg.N);
  const auto tests = test_grid(cfg.N, cfg.epsilon);
  const bool fixed = cfg.alpha_mode == AlphaMode::fixed_per_case;
  const std::size_t R = cfg.replicates;
  const std::size_t orders = cfg.n_max;

  const std::vector<std::pair<OrderingKind, StructureBuilder>> families = {
      {OrderingKind::linear, linear_family(cfg.n_max)},
      {OrderingKind::optimal, optimal_family(cfg.N, cfg.n_max)},
  };

  std::vector<std::vector<PreparedOrder>> prepared;
  for (const auto& [kind, builder] : families) {
    prepared.push_back(prepare(builder, cfg.n_max, inputs, tests));
  }

  const DataGenerator fixed_generator = case_generator(cfg, 0);
  const auto fixed_f0_train = evaluate_f0(fixed_generator, inputs);
  const auto fixed_f0_test = evaluate_f0(fixed_generator, tests);

  // [family][order][replicate]
  std::vector<std::vector<std::vector<double>>> noisy(
      families.size(), std::vector<std::vector<double>>(orders, std::vector<double>(R)));
  std::vector<std::vector<double>> clean_sum(families.size(), std::vector<double>(orders, 0.0));
  std::vector<std::vector<double>> norm_sum(families.size(), std::vector<double>(orders, 0.0));
  std::vector<std::vector<std::optional<std::string>>> failures(
      families.size(), std::vector<std::optional<std::string>>(orders));

  auto guarded = [&](std::size_t fam, std::size_t i, auto&& body) {
    try {
      return body();
    } catch (const std::exception& e) {
      if (!failures[fam][i]) failures[fam][i] = e.what();
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  auto accumulate_clean = [&](std::span<const Complex> f0_train, std::span<const Complex> f0_test) {
    for (std::size_t fam = 0; fam < families.size(); ++fam) {
      for (std::size_t i = 0; i < orders; ++i) {
        double theta_norm = std::numeric_limits<double>::quiet_NaN();
        clean_sum[fam][i] += guarded(fam, i, [&] {
          return score(prepared[fam][i], f0_train, f0_test, cfg.estimator, &theta_norm);
        });
        norm_sum[fam][i] += theta_norm;
      }
    }
  };

  // Noise-free data is identical across replicates when alpha is fixed.
  const std::size_t clean_runs = fixed ? 1 : R;
  if (fixed) accumulate_clean(fixed_f0_train, fixed_f0_test);

  for (std::size_t r = 0; r < R; ++r) {
    const auto data = replicate_dataset(cfg, r);
    ComplexVector f0_test_r;
    if (!fixed) {
      const auto g = case_generator(cfg, r);
      f0_test_r = evaluate_f0(g, tests);
      accumulate_clean(evaluate_f0(g, inputs), f0_test_r);
    }
    std::span<const Complex> f0_test = fixed ? std::span<const Complex>(fixed_f0_test) : f0_test_r;
    for (std::size_t fam = 0; fam < families.size(); ++fam) {
      for (std::size_t i = 0; i < orders; ++i) {
        noisy[fam][i][r] = guarded(fam, i, [&] {
          return score(prepared[fam][i], data.outputs, f0_test, cfg.estimator, nullptr);
        });
      }
    }
  }

  CaseResult result{.config = cfg, .linear = {}, .optimal = {}};
  for (std::size_t fam = 0; fam < families.size(); ++fam) {
    FamilyCurve& curve = fam == 0 ? result.linear : result.optimal;
    curve.family = families[fam].first;
    curve.spectrum = spectrum_from(prepared[fam], fixed ? std::optional(fixed_f0_train)
                                                        : std::nullopt);
    for (std::size_t i = 0; i < orders; ++i) {
      OrderResult o;
      o.order = i + 1;
      double sum = 0.0;
      for (const double v : noisy[fam][i]) sum += v;
      o.nmse_noisy_mean = sum / static_cast<double>(R);
      o.nmse_noisy_median = median(noisy[fam][i]);
      o.nmse_noisefree_mean = clean_sum[fam][i] / static_cast<double>(clean_runs);
      o.theta_star_norm = norm_sum[fam][i] / static_cast<double>(clean_runs);
      o.inv_sigma_min = curve.spectrum.inv_sigma_min[i];
      o.failure = prepared[fam][i].failure ? prepared[fam][i].failure : failures[fam][i];
      if (cfg.keep_replicates) o.nmse_noisy_replicates = std::move(noisy[fam][i]);
      curve.orders.push_back(std::move(o));
    }
  }
  return result;
}

DescentProfile double_descent_profile(std::span<const double> values) {
  DescentProfile profile;
  if (values.size() < 3) return profile;
  profile.final_value = values.back();

  std::optional<std::size_t> best;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    if (!best || v > values[*best]) best = i;
  }
  if (!best) return profile;
  const double hi = values[*best];
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) return profile;

  profile.peak_order = *best + 1;
  profile.peak_value = hi;
  profile.descends_after_peak = profile.final_value < hi;
  return profile;
}

DescentProfile double_descent_profile(const FamilyCurve& curve) {
  std::vector<double> values;
  values.reserve(curve.orders.size());
  for (const auto& o : curve.orders) values.push_back(o.nmse_noisy_mean);
  return double_descent_profile(values);
}

}  // namespace descent
