#pragma once

#include <span>
#include <stdexcept>

namespace limner::stats {

/// Input violates a precondition (too few samples, zero variance, ...).
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct RegressionReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  Interval slope_ci95;
  /// Two-sided p-value of H0: intercept == 0.
  double intercept_p = 1.0;
  int n = 0;
  double residual_se = 0.0;
};

struct TTestReport {
  double t = 0.0;
  int df = 0;
  double p = 1.0;  // two-sided
  double mean = 0.0;
  int n = 0;
};

struct Correlation {
  double r = 0.0;
  double p = 1.0;  // two-sided
};

/// Regularized incomplete beta I_x(a, b), continued fraction to 1e-14.
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, int df);

/// P(|T| >= |t|), evaluated directly on the tail so small p keep precision.
double student_t_two_sided_p(double t, int df);

/// Inverse CDF by bisection on student_t_cdf, tolerance 1e-10 in t.
double student_t_quantile(double prob, int df);

/// Ordinary least squares y = intercept + slope * x with classical
/// (homoscedastic) inference.
RegressionReport ols(std::span<const double> xs, std::span<const double> ys);

TTestReport t_test_one_sample(std::span<const double> xs, double mu0);

Correlation pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace limner::stats
