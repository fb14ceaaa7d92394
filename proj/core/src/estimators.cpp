#include "descent/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace descent {

Estimator Estimator::ridge(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("ridge: lambda must be a positive finite number, got " +
                                std::to_string(lambda) + " (use min_norm for lambda = 0)");
  }
  return Estimator(Kind::ridge, lambda);
}

double Estimator::solution_weight(double sigma) const {
  if (kind_ == Kind::min_norm) return 1.0 / sigma;
  return sigma / (sigma * sigma + lambda_);
}

double Estimator::covariance_weight(double sigma) const {
  if (kind_ == Kind::min_norm) return 1.0 / (sigma * sigma);
  const double denom = sigma * sigma + lambda_;
  return sigma * sigma / (denom * denom);
}

std::string Estimator::describe() const {
  if (kind_ == Kind::min_norm) return "min_norm";
  std::ostringstream out;
  out << "ridge(" << lambda_ << ")";
  return out.str();
}

ComplexVector solve(const SvdFactorization& f, std::span<const Complex> y, const Estimator& est) {
  if (y.size() != f.rows()) {
    throw DimensionError("solve: y has length " + std::to_string(y.size()) + ", expected " +
                         std::to_string(f.rows()));
  }
  ComplexVector theta(f.cols(), Complex{});
  for (std::size_t k = 0; k < f.rank; ++k) {
    const Complex coeff = est.solution_weight(f.singular_values[k]) * dot(f.u(k), y);
    auto vk = f.v(k);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += coeff * vk[i];
  }
  return theta;
}

ComplexVector solve_min_norm(const ComplexMatrix& phi, std::span<const Complex> y) {
  return solve(svd(phi), y, Estimator::min_norm());
}

ComplexVector solve_ridge(const ComplexMatrix& phi, std::span<const Complex> y, double lambda) {
  return solve(svd(phi), y, Estimator::ridge(lambda));
}

FittedModel fit(const ModelStructure& s, const Dataset& data, const Estimator& est) {
  const auto phi = regression_matrix(s, data.inputs);
  return {s, solve(svd(phi), data.outputs, est), est};
}

FittedModel fit_min_norm(const ModelStructure& s, const Dataset& data) {
  return fit(s, data, Estimator::min_norm());
}

FittedModel fit_ridge(const ModelStructure& s, const Dataset& data, double lambda) {
  return fit(s, data, Estimator::ridge(lambda));
}

Complex predict(const FittedModel& model, double x) {
  Complex acc{};
  const auto freqs = model.structure.frequencies();
  for (std::size_t i = 0; i < freqs.size(); ++i) acc += unit_phasor(freqs[i], x) * model.theta[i];
  return acc;
}

ComplexVector predict(const FittedModel& model, std::span<const double> xs) {
  ComplexVector out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = predict(model, xs[i]);
  return out;
}

ErrorDecomposition decompose_error(const SvdFactorization& f, std::span<const Complex> f0_values,
                                   const Estimator& est, double noise_variance) {
  const std::size_t n = f.cols();
  const std::size_t kept = std::max<std::size_t>(f.rank, 1);
  ErrorDecomposition d{
      .theta_star = solve(f, f0_values, est),
      .covariance_factor = ComplexMatrix(n, n),
      .mode_weights = {},
      .right_vectors = ComplexMatrix(n, kept),
      .noise_variance = noise_variance,
  };
  d.mode_weights.reserve(f.rank);
  for (std::size_t k = 0; k < f.rank; ++k) {
    const double w = est.covariance_weight(f.singular_values[k]);
    d.mode_weights.push_back(w);
    auto vk = f.v(k);
    std::copy(vk.begin(), vk.end(), d.right_vectors.column(k).begin());
    for (std::size_t j = 0; j < n; ++j) {
      const Complex cj = w * std::conj(vk[j]);
      for (std::size_t i = 0; i < n; ++i) d.covariance_factor(i, j) += vk[i] * cj;
    }
  }
  return d;
}

ErrorDecomposition decompose_error(const ComplexMatrix& phi, std::span<const Complex> f0_values,
                                   const Estimator& est, double noise_variance) {
  return decompose_error(svd(phi), f0_values, est, noise_variance);
}

double prediction_variance(const ErrorDecomposition& d, const ModelStructure& s, double x_test) {
  const auto row = s.basis_row(x_test);
  if (row.size() != d.right_vectors.rows()) {
    throw DimensionError("prediction_variance: structure order does not match decomposition");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < d.mode_weights.size(); ++k) {
    Complex proj{};
    auto vk = d.right_vectors.column(k);
    for (std::size_t i = 0; i < row.size(); ++i) proj += row[i] * vk[i];
    acc += d.mode_weights[k] * std::norm(proj);
  }
  return d.noise_variance * acc;
}

double BiasReport::max_abs_error() const {
  double m = 0.0;
  for (const auto& e : expected_error) m = std::max(m, std::abs(e));
  return m;
}

namespace {

// (Phi^+ Phi - I) theta = -(theta - sum_{k<rank} v_k v_k^H theta).
ComplexVector null_space_component(const SvdFactorization& f, std::span<const Complex> theta) {
  ComplexVector out(theta.begin(), theta.end());
  for (std::size_t k = 0; k < f.rank; ++k) {
    auto vk = f.v(k);
    const Complex c = dot(vk, theta);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * vk[i];
  }
  return out;
}

}  // namespace

BiasReport bias_report(const ModelStructure& s, std::span<const double> inputs,
                       std::span<const Complex> theta0, std::span<const double> test_points) {
  if (theta0.size() != s.order()) {
    throw DimensionError("bias_report: theta0 has length " + std::to_string(theta0.size()) +
                         ", structure order is " + std::to_string(s.order()));
  }
  const auto f = svd(regression_matrix(s, inputs));
  const auto residual = null_space_component(f, theta0);
  BiasReport report{.test_points = {test_points.begin(), test_points.end()},
                    .expected_error = {},
                    .projection_rank = s.order() - f.rank};
  report.expected_error.reserve(test_points.size());
  for (const double x : test_points) {
    const auto row = s.basis_row(x);
    Complex e{};
    for (std::size_t i = 0; i < row.size(); ++i) e -= row[i] * residual[i];
    report.expected_error.push_back(e);
  }
  return report;
}

BiasReport bias_report(const ModelStructure& s, std::span<const double> inputs,
                       const std::function<Complex(double)>& f0,
                       std::span<const double> test_points) {
  const auto f = svd(regression_matrix(s, inputs));
  ComplexVector f0_train(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) f0_train[t] = f0(inputs[t]);
  const FittedModel star{s, pseudo_inverse_apply(f, f0_train), Estimator::min_norm()};
  BiasReport report{.test_points = {test_points.begin(), test_points.end()},
                    .expected_error = {},
                    .projection_rank = s.order() - f.rank};
  report.expected_error.reserve(test_points.size());
  for (const double x : test_points) report.expected_error.push_back(predict(star, x) - f0(x));
  return report;
}

double row_space_bias_indicator(const ComplexMatrix& phi, std::span<const Complex> theta0) {
  if (theta0.size() != phi.cols()) {
    throw DimensionError("row_space_bias_indicator: theta0 has length " +
                         std::to_string(theta0.size()) + ", Phi has " +
                         std::to_string(phi.cols()) + " columns");
  }
  return norm(null_space_component(svd(phi), theta0));
}

double variance_optimality_gap(const SvdFactorization& f) {
  double inv_sum = 0.0;
  double sum = 0.0;
  for (const double s : f.singular_values) {
    if (!(s > 0.0)) {
      throw std::domain_error("variance_optimality_gap: zero singular value in a " +
                              shape_string(f.rows(), f.cols()) + " factorization");
    }
    inv_sum += 1.0 / (s * s);
    sum += s * s;
  }
  const double r = static_cast<double>(f.size());
  return std::max(0.0, inv_sum - r * r / sum);
}

}  // namespace descent
