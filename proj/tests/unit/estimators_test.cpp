#include <gtest/gtest.h>

#include <cmath>

#include "descent/estimators.hpp"
#include "descent/experiment.hpp"
#include "oracles.hpp"

using namespace descent;

namespace {

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m(d.size(), d.size());
  std::size_t i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

// Ridge solution via the stacked least-squares problem [Phi; sqrt(lambda) I].
ComplexVector ridge_oracle(const ComplexMatrix& phi, const ComplexVector& y, double lambda) {
  ComplexMatrix stacked(phi.rows() + phi.cols(), phi.cols());
  for (std::size_t j = 0; j < phi.cols(); ++j) {
    for (std::size_t i = 0; i < phi.rows(); ++i) stacked(i, j) = phi(i, j);
    stacked(phi.rows() + j, j) = std::sqrt(lambda);
  }
  ComplexVector rhs(y);
  rhs.resize(phi.rows() + phi.cols(), Complex{});
  return oracle::normal_equation_solve(stacked, rhs);
}

Dataset noisy_case_data(std::uint64_t seed, std::size_t N = 10) {
  auto cfg = preset("A");
  cfg.base_seed = seed;
  cfg.N = N;
  return replicate_dataset(cfg, 0);
}

}  // namespace

TEST(MinNorm, IdentityReproducesData) {
  const auto theta = solve_min_norm(ComplexMatrix::identity(2), ComplexVector{2.0, 3.0});
  EXPECT_NEAR(std::abs(theta[0] - 2.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(theta[1] - 3.0), 0.0, 1e-15);
}

TEST(MinNorm, PicksSmallestInterpolant) {
  const auto phi = ComplexMatrix::from_rows(1, 2, {1.0, 1.0});
  const auto theta = solve_min_norm(phi, ComplexVector{2.0});
  EXPECT_NEAR(std::abs(theta[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(theta[1] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(norm(theta), std::sqrt(2.0), 1e-15);
  EXPECT_LT(norm(theta), norm(ComplexVector{2.0, 0.0}));
}

TEST(MinNorm, MatchesNormalEquationsWhenUnderparametrized) {
  oracle::RandomSource rng(321);
  const auto phi = rng.matrix(12, 5);
  const auto y = rng.vector(12);
  EXPECT_LE(oracle::relative_difference(solve_min_norm(phi, y), oracle::normal_equation_solve(phi, y)),
            1e-9);
}

TEST(MinNorm, AddingNullSpaceDirectionsNeverShrinksTheNorm) {
  oracle::RandomSource rng(4);
  const auto s = build_linear(16, 30);
  const auto phi = regression_matrix(s, sample_times(10));
  const auto f = svd(phi);
  const auto theta = solve(f, noisy_case_data(3).outputs, Estimator::min_norm());
  for (int trial = 0; trial < 50; ++trial) {
    // w = (I - V V^H) r lies in the null space of phi.
    auto w = rng.vector(16);
    for (std::size_t k = 0; k < f.rank; ++k) {
      const Complex c = dot(f.v(k), w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * f.v(k)[i];
    }
    ComplexVector shifted(theta);
    for (std::size_t i = 0; i < w.size(); ++i) shifted[i] += w[i];
    EXPECT_GE(norm(shifted), norm(theta) * (1 - 1e-12));
  }
}

TEST(Ridge, ScalarShrinksByHalf) {
  const auto theta = solve_ridge(ComplexMatrix::identity(1), ComplexVector{1.0}, 1.0);
  EXPECT_DOUBLE_EQ(theta[0].real(), 0.5);
}

TEST(Ridge, IdentityShrinksEachCoordinate) {
  const auto theta = solve_ridge(ComplexMatrix::identity(2), ComplexVector{2.0, 3.0}, 1.0);
  EXPECT_NEAR(std::abs(theta[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(theta[1] - 1.5), 0.0, 1e-15);
}

TEST(Ridge, RejectsNonPositiveLambda) {
  EXPECT_THROW(Estimator::ridge(0.0), std::invalid_argument);
  EXPECT_THROW(Estimator::ridge(-1.0), std::invalid_argument);
  EXPECT_THROW(solve_ridge(ComplexMatrix::identity(2), ComplexVector{1.0, 1.0}, 0.0),
               std::invalid_argument);
}

TEST(Ridge, MatchesStackedLeastSquares) {
  oracle::RandomSource rng(8);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{9, 4}, {4, 9}}) {
    const auto phi = rng.matrix(r, c);
    const auto y = rng.vector(r);
    for (double lambda : {1e-2, 1.0, 10.0}) {
      EXPECT_LE(oracle::relative_difference(solve_ridge(phi, y, lambda), ridge_oracle(phi, y, lambda)),
                1e-10);
    }
  }
}

TEST(Ridge, TinyLambdaConvergesToMinNorm) {
  oracle::RandomSource rng(12);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{8, 5}, {5, 8}, {6, 6}}) {
    const auto phi = rng.matrix(r, c);
    const auto y = rng.vector(r);
    EXPECT_LE(oracle::relative_difference(solve_ridge(phi, y, 1e-12), solve_min_norm(phi, y)), 1e-6);
  }
}

TEST(Ridge, CovarianceWeightApproachesInverseSquare) {
  for (double s : {0.5, 1.0, 3.0}) {
    EXPECT_NEAR(Estimator::ridge(1e-14).covariance_weight(s) * s * s, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(Estimator::min_norm().covariance_weight(s), 1.0 / (s * s));
  }
}

TEST(Predict, ZeroParametersPredictZero) {
  const FittedModel m{build_linear(5, 30), ComplexVector(5), Estimator::min_norm()};
  EXPECT_EQ(predict(m, 2.7), Complex(0.0));
}

TEST(Predict, ConstantModel) {
  const FittedModel m{build_linear(1, 30), ComplexVector{Complex(0.3, -2.0)}, Estimator::min_norm()};
  for (double x : {0.0, 1.5, -4.0}) EXPECT_NEAR(std::abs(predict(m, x) - Complex(0.3, -2.0)), 0.0, 1e-15);
}

TEST(Predict, OverparametrizedMinNormInterpolatesNoisyData) {
  const auto data = noisy_case_data(19);
  for (std::size_t n = 10; n <= 30; ++n) {
    for (const auto& s : {build_linear(n, 30), build_optimal(n, 10, 30)}) {
      const auto model = fit_min_norm(s, data);
      for (std::size_t t = 0; t < data.size(); ++t) {
        EXPECT_NEAR(std::abs(predict(model, data.inputs[t]) - data.outputs[t]), 0.0, 1e-8)
            << to_string(s.kind()) << " n=" << n << " t=" << t;
      }
    }
  }
}

TEST(Properties, RidgeDoesNotInterpolateAndShrinks) {
  const auto data = noisy_case_data(23);
  for (std::size_t n : {10u, 15u, 30u}) {
    const auto s = build_optimal(n, 10, 30);
    const auto phi = regression_matrix(s, data.inputs);
    const double min_norm = norm(fit_min_norm(s, data).theta);
    double previous = min_norm;
    for (double lambda : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const auto model = fit_ridge(s, data, lambda);
      const double residual = norm(subtract(matvec(phi, model.theta), data.outputs));
      EXPECT_GT(residual, 0.0);
      const double nrm = norm(model.theta);
      EXPECT_LE(nrm, min_norm);
      EXPECT_LT(nrm, previous) << "lambda=" << lambda;
      previous = nrm;
    }
  }
}

TEST(ErrorDecomposition, NoiseFreeFitEqualsThetaStar) {
  Rng rng(41);
  DataGenerator g{.alpha = draw_alpha(rng), .noise_variance = 0.0};
  const auto inputs = sample_times(10);
  const auto f0 = evaluate_f0(g, inputs);
  for (const auto& est : {Estimator::min_norm(), Estimator::ridge(0.05)}) {
    const auto s = build_linear(14, 30);
    const auto d = decompose_error(regression_matrix(s, inputs), f0, est, 0.1);
    const auto fitted = fit(s, generate_dataset(g, inputs, rng), est);
    EXPECT_EQ(fitted.theta, d.theta_star);
  }
}

TEST(ErrorDecomposition, CovarianceFactorIsHermitianPsd) {
  oracle::RandomSource rng(6);
  const auto phi = rng.matrix(6, 9);
  for (const auto& est : {Estimator::min_norm(), Estimator::ridge(0.3)}) {
    const auto d = decompose_error(phi, rng.vector(6), est, 0.1);
    const auto& c = d.covariance_factor;
    for (std::size_t i = 0; i < c.rows(); ++i) {
      for (std::size_t j = 0; j < c.cols(); ++j) EXPECT_NEAR(std::abs(c(i, j) - std::conj(c(j, i))), 0.0, 1e-12);
    }
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = rng.vector(9);
      EXPECT_GE(dot(x, matvec(c, x)).real(), -1e-12);
    }
  }
}

TEST(ErrorDecomposition, MonteCarloMeanMatchesThetaStar) {
  auto cfg = preset("A");
  cfg.base_seed = 5;
  const auto g = case_generator(cfg);
  const auto inputs = sample_times(10);
  const auto s = build_linear(6, 30);
  const auto f = svd(regression_matrix(s, inputs));
  const auto d = decompose_error(f, evaluate_f0(g, inputs), Estimator::min_norm(), cfg.noise_variance);

  const std::size_t R = 2000;
  ComplexVector sum(s.order());
  for (std::size_t r = 0; r < R; ++r) {
    const auto theta = solve(f, replicate_dataset(cfg, r).outputs, Estimator::min_norm());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += theta[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    // Per-component standard error from the closed-form covariance.
    const double se = std::sqrt(cfg.noise_variance * d.covariance_factor(i, i).real() / R);
    EXPECT_LE(std::abs(sum[i] / static_cast<double>(R) - d.theta_star[i]), 3.0 * se) << "i=" << i;
  }
}

TEST(PredictionVariance, SkipsModesOrthogonalToTheTestRow) {
  // Columns (1,1,1) and (1,-1,1): sigma^2 = 4 along (1,1)/sqrt2, 2 along (1,-1)/sqrt2.
  const auto s = build_custom({{0, 1}, {1, 2}}, 2);
  const std::vector<double> inputs{0.0, 1.0, 2.0};
  const auto d = decompose_error(regression_matrix(s, inputs), ComplexVector(3), Estimator::min_norm(), 0.1);
  // phi(0) = (1, 1) is orthogonal to the small-sigma mode.
  EXPECT_NEAR(prediction_variance(d, s, 0.0), 0.1 * 0.25 * 2.0, 1e-15);
  // phi(1) = (1, -1) is orthogonal to the large-sigma mode.
  EXPECT_NEAR(prediction_variance(d, s, 1.0), 0.1 * 0.5 * 2.0, 1e-15);
}

TEST(PredictionVariance, UnitSpectrum) {
  const auto s = build_linear(1, 1);
  const auto d = decompose_error(regression_matrix(s, std::vector<double>{0.0}), ComplexVector{1.0},
                                 Estimator::min_norm(), 0.1);
  EXPECT_NEAR(prediction_variance(d, s, 0.7), 0.1, 1e-15);
}

TEST(PredictionVariance, MatchesMonteCarloVariance) {
  auto cfg = preset("A");
  cfg.base_seed = 17;
  const auto inputs = sample_times(10);
  const auto s = build_optimal(13, 10, 30);
  const auto f = svd(regression_matrix(s, inputs));
  const auto d = decompose_error(f, evaluate_f0(case_generator(cfg), inputs), Estimator::min_norm(),
                                 cfg.noise_variance);
  const double x = 3.5;
  const std::size_t R = 2000;
  ComplexVector preds;
  Complex mean{};
  for (std::size_t r = 0; r < R; ++r) {
    const FittedModel m{s, solve(f, replicate_dataset(cfg, r).outputs, Estimator::min_norm()),
                        Estimator::min_norm()};
    preds.push_back(predict(m, x));
    mean += preds.back();
  }
  mean /= static_cast<double>(R);
  double var = 0.0;
  for (const auto& p : preds) var += std::norm(p - mean);
  var /= static_cast<double>(R - 1);
  EXPECT_NEAR(var / prediction_variance(d, s, x), 1.0, 0.10);
}

TEST(PredictionVariance, BoundedByInverseSmallestSingularValue) {
  const auto inputs = sample_times(10);
  for (std::size_t n = 1; n <= 30; ++n) {
    for (const auto& s : {build_linear(n, 30), build_optimal(n, 10, 30)}) {
      const auto f = svd(regression_matrix(s, inputs));
      const auto d = decompose_error(f, ComplexVector(10), Estimator::min_norm(), 0.1);
      for (double x : {0.25, 4.5, 9.75}) {
        const double bound = 0.1 * norm_squared(s.basis_row(x)) / (f.sigma_min() * f.sigma_min());
        EXPECT_LE(prediction_variance(d, s, x), bound * (1 + 1e-9));
      }
    }
  }
}

TEST(Bias, ZeroWhenUnderparametrizedAndCorrectlySpecified) {
  oracle::RandomSource rng(2);
  const auto inputs = sample_times(10);
  const auto tests = test_grid(10, 0.5);
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto s = build_optimal(n, 10, 30);
    const auto report = bias_report(s, inputs, rng.vector(n), tests);
    EXPECT_EQ(report.projection_rank, 0u);
    EXPECT_LE(report.max_abs_error(), 1e-10);
  }
}

TEST(Bias, ProjectionRankIsExcessOrder) {
  oracle::RandomSource rng(3);
  const auto s = build_optimal(12, 10, 30);
  EXPECT_EQ(bias_report(s, sample_times(10), rng.vector(12), test_grid(10, 0.5)).projection_rank, 2u);
  EXPECT_EQ(bias_report(build_linear(12, 30), sample_times(10), rng.vector(12), test_grid(10, 0.5))
                .projection_rank,
            2u);
}

TEST(Bias, RowSpaceParametersHaveNoBias) {
  oracle::RandomSource rng(10);
  const auto inputs = sample_times(10);
  const auto tests = test_grid(10, 0.5);
  for (std::size_t n = 11; n <= 30; ++n) {
    const auto s = build_optimal(n, 10, 30);
    const auto phi = regression_matrix(s, inputs);
    const auto theta0 = matvec(hermitian_transpose(phi), rng.vector(10));
    EXPECT_LE(bias_report(s, inputs, theta0, tests).max_abs_error(), 1e-9) << "n=" << n;
    EXPECT_LE(row_space_bias_indicator(phi, theta0), 1e-9) << "n=" << n;
  }
}

TEST(Bias, MisspecifiedMatchesDirectFormula) {
  Rng rng(9);
  DataGenerator g{.alpha = draw_alpha(rng), .kind = GeneratorKind::opt};
  const auto inputs = sample_times(10);
  const auto tests = test_grid(10, 0.5);
  const auto f0 = [&](double x) { return evaluate_f0(g, x); };
  for (std::size_t n : {4u, 10u, 17u}) {
    const auto s = build_linear(n, 30);
    const auto report = bias_report(s, inputs, f0, tests);
    const FittedModel star{s, solve_min_norm(regression_matrix(s, inputs), evaluate_f0(g, inputs)),
                           Estimator::min_norm()};
    for (std::size_t i = 0; i < tests.size(); ++i) {
      EXPECT_NEAR(std::abs(report.expected_error[i] - (predict(star, tests[i]) - f0(tests[i]))), 0.0, 1e-9);
    }
  }
  // Interpolating orders have no bias at the training inputs.
  EXPECT_LE(bias_report(build_linear(20, 30), inputs, f0, inputs).max_abs_error(), 1e-8);
}

TEST(RowSpaceIndicator, NullSpaceVectorIsFullyProjected) {
  const auto phi = ComplexMatrix::from_rows(1, 2, {1.0, 1.0});
  const ComplexVector theta0{1.0, -1.0};
  EXPECT_NEAR(row_space_bias_indicator(phi, theta0), std::sqrt(2.0), 1e-14);

  // phi = A (I - w w^H / |w|^2) annihilates w.
  oracle::RandomSource rng(14);
  const auto a = rng.matrix(3, 6);
  const auto w = rng.vector(6);
  auto proj = ComplexMatrix::identity(6);
  const double ww = norm_squared(w);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) proj(i, j) -= w[i] * std::conj(w[j]) / ww;
  EXPECT_NEAR(row_space_bias_indicator(matmul(a, proj), w), norm(w), 1e-10 * norm(w));
}

TEST(RowSpaceIndicator, ZeroForFullColumnRank) {
  oracle::RandomSource rng(15);
  const auto phi = rng.matrix(8, 5);
  for (int trial = 0; trial < 10; ++trial) EXPECT_LE(row_space_bias_indicator(phi, rng.vector(5)), 1e-12);
}

TEST(VarianceGap, EqualSpectrumIsOptimal) {
  EXPECT_NEAR(variance_optimality_gap(svd(ComplexMatrix::identity(3))), 0.0, 1e-15);
}

TEST(VarianceGap, DirectArithmetic) {
  EXPECT_NEAR(variance_optimality_gap(svd(diag({2.0, 1.0}))), 0.45, 1e-15);
}

TEST(VarianceGap, OptimalOrderingHasNoGap) {
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto f = svd(regression_matrix(build_optimal(n, 10, 30), sample_times(10)));
    EXPECT_LE(variance_optimality_gap(f), 1e-10);
  }
  const auto f = svd(regression_matrix(build_linear(8, 30), sample_times(10)));
  EXPECT_GT(variance_optimality_gap(f), 1.0);
}

TEST(VarianceGap, ZeroSingularValueFails) {
  EXPECT_THROW(variance_optimality_gap(svd(diag({1.0, 0.0}))), std::domain_error);
}
