#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "descent/model.hpp"
#include "oracles.hpp"

using namespace descent;

namespace {

std::vector<double> values(const ModelStructure& s) {
  std::vector<double> out;
  for (const auto& f : s.frequencies()) out.push_back(f.value());
  return out;
}

std::set<std::pair<std::int64_t, std::int64_t>> reduced_set(const ModelStructure& s) {
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& f : s.frequencies()) {
    const auto g = std::gcd(f.numerator, f.denominator);
    out.emplace(f.numerator / g, f.denominator / g);
  }
  return out;
}

}  // namespace

TEST(BuildLinear, FirstOrders) {
  EXPECT_EQ(values(build_linear(1, 30)), std::vector<double>{0.0});
  const auto s = build_linear(3, 30);
  ASSERT_EQ(s.order(), 3u);
  EXPECT_EQ(s.frequencies()[1], (Frequency{1, 30}));
  EXPECT_EQ(s.frequencies()[2], (Frequency{2, 30}));
  EXPECT_EQ(s.kind(), OrderingKind::linear);
}

TEST(BuildLinear, RejectsOrderOutOfRange) {
  EXPECT_THROW(build_linear(0, 30), std::invalid_argument);
  EXPECT_THROW(build_linear(31, 30), std::invalid_argument);
}

TEST(BuildOptimal, UpToNIsTheCoarseGrid) {
  const auto s = build_optimal(10, 10, 30);
  for (std::int64_t k = 0; k < 10; ++k) EXPECT_EQ(s.frequencies()[k], (Frequency{k, 10}));
}

TEST(BuildOptimal, ContinuesWithFineGridMinusCoarse) {
  const auto s = build_optimal(13, 10, 30);
  ASSERT_EQ(s.order(), 13u);
  EXPECT_EQ(s.frequencies()[10], (Frequency{1, 30}));
  EXPECT_EQ(s.frequencies()[11], (Frequency{2, 30}));
  EXPECT_EQ(s.frequencies()[12], (Frequency{4, 30}));
}

TEST(BuildOptimal, FullOrderIsTheLinearSetReordered) {
  const auto opt = build_optimal(30, 10, 30);
  const auto lin = build_linear(30, 30);
  EXPECT_EQ(reduced_set(opt), reduced_set(lin));
  EXPECT_NE(values(opt), values(lin));
}

TEST(BuildOptimal, NonDividingGridStillYieldsDistinctFrequencies) {
  // N = 4 does not divide n_max = 6: 0 and 3/6 coincide with the coarse grid.
  const auto s = build_optimal(6, 4, 6);
  EXPECT_EQ(s.frequencies()[4], (Frequency{1, 6}));
  EXPECT_EQ(s.frequencies()[5], (Frequency{2, 6}));
}

TEST(BuildOptimal, RejectsBadArguments) {
  EXPECT_THROW(build_optimal(0, 10, 30), std::invalid_argument);
  EXPECT_THROW(build_optimal(31, 10, 30), std::invalid_argument);
  EXPECT_THROW(build_optimal(5, 40, 30), std::invalid_argument);
}

TEST(Families, AreNestedAndDuplicateFree) {
  for (std::size_t n = 1; n < 30; ++n) {
    for (auto build : {+[](std::size_t k) { return build_linear(k, 30); },
                       +[](std::size_t k) { return build_optimal(k, 10, 30); }}) {
      const auto a = build(n);
      const auto b = build(n + 1);
      ASSERT_EQ(b.order(), n + 1);
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(a.frequencies()[i], b.frequencies()[i]);
      EXPECT_EQ(reduced_set(b).size(), n + 1);
    }
  }
}

TEST(CustomStructure, ValidatesFrequencies) {
  EXPECT_NO_THROW(build_custom({{0, 1}, {1, 7}, {3, 5}}, 5));
  EXPECT_THROW(build_custom({{1, 3}, {10, 30}}, 5), std::invalid_argument);
  EXPECT_THROW(build_custom({{3, 3}}, 5), std::invalid_argument);
  EXPECT_THROW(build_custom({{0, 1}, {1, 4}}, 1), std::invalid_argument);
}

TEST(RegressionMatrix, ZeroFrequencyIsAColumnOfOnes) {
  const auto phi = regression_matrix(build_linear(1, 30), std::vector<double>{0.3, 2.0, -7.5});
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(phi(t, 0), Complex(1.0));
}

TEST(RegressionMatrix, EntriesAreComplexExponentials) {
  const auto s = build_linear(4, 30);
  const std::vector<double> x{0.0, 1.5, 7.0};
  const auto phi = regression_matrix(s, x);
  ASSERT_EQ(phi.rows(), 3u);
  ASSERT_EQ(phi.cols(), 4u);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t i = 0; i < 4; ++i) {
      const Complex expected = std::exp(Complex(0.0, 2.0 * std::numbers::pi * i / 30.0 * x[t]));
      EXPECT_NEAR(std::abs(phi(t, i) - expected), 0.0, 1e-14);
    }
  }
  EXPECT_THROW(regression_matrix(s, std::vector<double>{}), DimensionError);
}

TEST(RegressionMatrix, OptimalOrderingColumnsAreOrthogonalWithNormSqrtN) {
  const auto phi = regression_matrix(build_optimal(10, 10, 30), sample_times(10));
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(norm(phi.column(i)), std::sqrt(10.0), 1e-12);
    for (std::size_t j = i + 1; j < 10; ++j) EXPECT_LT(std::abs(dot(phi.column(i), phi.column(j))), 1e-12);
  }
}

TEST(RegressionMatrix, OptimalOrderingIsVarianceOptimalForEveryOrderUpToN) {
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto f = svd(regression_matrix(build_optimal(n, 10, 30), sample_times(10)));
    for (double s : f.singular_values) EXPECT_NEAR(s, std::sqrt(10.0), 1e-10) << "n=" << n;
  }
}

TEST(RegressionMatrix, LinearOrderingSigmaMinMatchesEigenOracle) {
  const auto phi = regression_matrix(build_linear(10, 30), sample_times(10));
  const double got = svd(phi).sigma_min();
  const double expected = oracle::gram_singular_values<oracle::HighPrecision>(phi).back();
  EXPECT_NEAR(got / expected, 1.0, 1e-8);
}

TEST(DataGenerator, FirstUnitCoefficientIsConstant) {
  for (auto kind : {GeneratorKind::lin, GeneratorKind::opt}) {
    DataGenerator g{.kind = kind};
    g.alpha[0] = 1.0;
    for (double x : {0.0, 0.5, 3.25, 9.0}) EXPECT_NEAR(std::abs(evaluate_f0(g, x) - 1.0), 0.0, 1e-15);
  }
}

TEST(DataGenerator, SecondLinearTermHasFrequencyOneOverNmax) {
  DataGenerator g{.kind = GeneratorKind::lin, .n_max = 30};
  g.alpha[1] = 1.0;
  for (double x : {0.0, 0.5, 3.25, 9.0}) {
    const Complex expected = std::exp(Complex(0.0, 2.0 * std::numbers::pi * x / 30.0));
    EXPECT_NEAR(std::abs(evaluate_f0(g, x) - expected), 0.0, 1e-14);
  }
}

TEST(DataGenerator, OptTermsUseDenominatorN) {
  DataGenerator g{.kind = GeneratorKind::opt, .n_max = 30, .N = 10};
  g.alpha[3] = 1.0;
  const Complex expected = std::exp(Complex(0.0, 2.0 * std::numbers::pi * 0.3 * 1.5));
  EXPECT_NEAR(std::abs(evaluate_f0(g, 1.5) - expected), 0.0, 1e-14);
}

TEST(DataGenerator, ValueAtZeroIsCoefficientSum) {
  Rng rng(5);
  DataGenerator g{.alpha = draw_alpha(rng)};
  Complex sum{};
  for (const auto& a : g.alpha) sum += a;
  EXPECT_NEAR(std::abs(evaluate_f0(g, 0.0) - sum), 0.0, 1e-14);
}

TEST(GenerateDataset, NoiseFreeIsExact) {
  Rng rng(11);
  DataGenerator g{.alpha = draw_alpha(rng), .noise_variance = 0.0};
  const auto inputs = sample_times(10);
  const auto d = generate_dataset(g, inputs, rng);
  EXPECT_EQ(d.inputs, inputs);
  for (std::size_t t = 0; t < 10; ++t) EXPECT_EQ(d.outputs[t], evaluate_f0(g, inputs[t]));
}

TEST(GenerateDataset, NoiseHasRequestedCircularMoments) {
  DataGenerator g{.noise_variance = 0.1};  // alpha = 0, so y = z
  Rng rng(2024);
  const auto d = generate_dataset(g, std::vector<double>(100000, 0.0), rng);
  Complex mean{};
  double power = 0.0, re2 = 0.0, im2 = 0.0;
  for (const auto& z : d.outputs) {
    mean += z;
    power += std::norm(z);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
  }
  const double n = static_cast<double>(d.size());
  EXPECT_LT(std::abs(mean / n), 0.01);
  EXPECT_GE(power / n, 0.095);
  EXPECT_LE(power / n, 0.105);
  EXPECT_NEAR(re2 / n, 0.05, 0.0025);
  EXPECT_NEAR(im2 / n, 0.05, 0.0025);
}

TEST(GenerateDataset, FixedSeedIsBitIdentical) {
  DataGenerator g{.noise_variance = 0.1};
  g.alpha[2] = Complex(0.3, -1.0);
  Rng a(77), b(77);
  const auto da = generate_dataset(g, sample_times(10), a);
  const auto db = generate_dataset(g, sample_times(10), b);
  EXPECT_EQ(da.outputs, db.outputs);
}

TEST(Rng, StreamSeedsDifferAcrossComponents) {
  const auto base = derive_stream_seed(1, stream_tag("A"), 0);
  EXPECT_NE(base, derive_stream_seed(2, stream_tag("A"), 0));
  EXPECT_NE(base, derive_stream_seed(1, stream_tag("B"), 0));
  EXPECT_NE(base, derive_stream_seed(1, stream_tag("A"), 1));
  EXPECT_EQ(base, derive_stream_seed(1, stream_tag("A"), 0));
}

TEST(Rng, UniformStaysInOpenInterval) {
  Rng rng(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
