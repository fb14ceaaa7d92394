#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "descent/linalg.hpp"
#include "descent/model.hpp"

namespace descent {

class Estimator {
 public:
  enum class Kind { min_norm, ridge };

  static Estimator min_norm() { return Estimator(Kind::min_norm, 0.0); }
  // Throws std::invalid_argument unless lambda > 0.
  static Estimator ridge(double lambda);

  Kind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  bool is_ridge() const noexcept { return kind_ == Kind::ridge; }

  // Filter applied to u_k^H y: 1/sigma (min-norm) or sigma/(sigma^2 + lambda).
  double solution_weight(double sigma) const;
  // Weight of v_k v_k^H in the parameter covariance, in units of r_z:
  // 1/sigma^2 (min-norm) or sigma^2/(sigma^2 + lambda)^2.
  double covariance_weight(double sigma) const;

  std::string describe() const;
  friend bool operator==(const Estimator&, const Estimator&) = default;

 private:
  Estimator(Kind kind, double lambda) : kind_(kind), lambda_(lambda) {}
  Kind kind_;
  double lambda_;
};

struct FittedModel {
  ModelStructure structure;
  ComplexVector theta;
  Estimator estimator;
};

// Spectral-filter solve over the retained modes (k < f.rank).
ComplexVector solve(const SvdFactorization& f, std::span<const Complex> y, const Estimator& est);

ComplexVector solve_min_norm(const ComplexMatrix& phi, std::span<const Complex> y);
ComplexVector solve_ridge(const ComplexMatrix& phi, std::span<const Complex> y, double lambda);

FittedModel fit_min_norm(const ModelStructure& s, const Dataset& data);
FittedModel fit_ridge(const ModelStructure& s, const Dataset& data, double lambda);
FittedModel fit(const ModelStructure& s, const Dataset& data, const Estimator& est);

Complex predict(const FittedModel& model, double x);
ComplexVector predict(const FittedModel& model, std::span<const double> xs);

// theta_hat = theta_star + theta_tilde, with theta_tilde zero-mean and
// covariance r_z * sum_k w_k v_k v_k^H.
struct ErrorDecomposition {
  ComplexVector theta_star;
  ComplexMatrix covariance_factor;
  std::vector<double> mode_weights;  // w_k for the retained modes
  ComplexMatrix right_vectors;       // v_k for the retained modes, column k
  double noise_variance = 0.0;
};

ErrorDecomposition decompose_error(const SvdFactorization& f, std::span<const Complex> f0_values,
                                   const Estimator& est, double noise_variance);
ErrorDecomposition decompose_error(const ComplexMatrix& phi, std::span<const Complex> f0_values,
                                   const Estimator& est, double noise_variance);

// R_e(x') = r_z * sum_k w_k |phi(x') v_k|^2.
double prediction_variance(const ErrorDecomposition& d, const ModelStructure& s, double x_test);

struct BiasReport {
  std::vector<double> test_points;
  ComplexVector expected_error;  // E e(x') per test point
  std::size_t projection_rank = 0;

  double max_abs_error() const;
};

// Correctly specified: E e(x') = phi(x') (Phi^+ Phi - I) theta0.
BiasReport bias_report(const ModelStructure& s, std::span<const double> inputs,
                       std::span<const Complex> theta0, std::span<const double> test_points);

// Misspecified: E e(x') = phi(x') Phi^+ f0(x) - f0(x').
BiasReport bias_report(const ModelStructure& s, std::span<const double> inputs,
                       const std::function<Complex(double)>& f0,
                       std::span<const double> test_points);

// |(Phi^+ Phi - I) theta0|: distance from theta0 to the row space of Phi.
double row_space_bias_indicator(const ComplexMatrix& phi, std::span<const Complex> theta0);

// sum_k 1/sigma_k^2 - r^2 / sum_k sigma_k^2; zero iff all sigma_k are equal.
double variance_optimality_gap(const SvdFactorization& f);

}  // namespace descent
