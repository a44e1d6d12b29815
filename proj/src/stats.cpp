#include "limner/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace limner::stats {

namespace {

constexpr double kCfTolerance = 1e-14;
constexpr int kCfMaxIterations = 100000;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kCfTolerance) return h;
  }
  return h;
}

// I_x(a,b) with y = 1 - x supplied separately so callers can pass an
// accurately computed complement.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, y) / b;
}

// Lower tail P(T <= -|t|).
double t_tail(double t, int df) {
  const double nu = df;
  const double t2 = t * t;
  const double x = nu / (nu + t2);
  const double y = t2 / (nu + t2);
  return 0.5 * incomplete_beta_xy(0.5 * nu, 0.5, x, y);
}

void require_df(int df) {
  if (df < 1) throw DegenerateInput("degrees of freedom must be >= 1, got " + std::to_string(df));
}

void require_finite(std::span<const double> v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DegenerateInput(std::string(name) + " contains a non-finite value");
  }
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DegenerateInput("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DegenerateInput("incomplete_beta: x outside [0, 1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double student_t_cdf(double t, int df) {
  require_df(df);
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = t_tail(t, df);
  return t < 0.0 ? tail : 1.0 - tail;
}

double student_t_two_sided_p(double t, int df) {
  require_df(df);
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return std::clamp(2.0 * t_tail(t, df), 0.0, 1.0);
}

double student_t_quantile(double prob, int df) {
  require_df(df);
  if (!(prob > 0.0 && prob < 1.0)) throw DegenerateInput("student_t_quantile: prob outside (0, 1)");
  double lo = -1.0;
  double hi = 1.0;
  while (student_t_cdf(lo, df) > prob) lo *= 2.0;
  while (student_t_cdf(hi, df) < prob) hi *= 2.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df) < prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

RegressionReport ols(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DegenerateInput("ols: xs and ys differ in length");
  const std::size_t n = xs.size();
  if (n < 3) throw DegenerateInput("ols: need at least 3 points, got " + std::to_string(n));
  require_finite(xs, "xs");
  require_finite(ys, "ys");

  const double xbar = mean_of(xs);
  const double ybar = mean_of(ys);
  double sxx = 0.0, sxy = 0.0, syy = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - xbar;
    const double dy = ys[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
    y2 += ys[i] * ys[i];
  }
  if (!(sxx > 0.0)) throw DegenerateInput("ols: xs have zero variance");

  RegressionReport r;
  r.n = static_cast<int>(n);
  r.slope = sxy / sxx;
  r.intercept = ybar - r.slope * xbar;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (r.intercept + r.slope * xs[i]);
    sse += e * e;
  }
  const int df = static_cast<int>(n) - 2;
  r.residual_se = std::sqrt(sse / df);
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;

  // Residuals at the level of double rounding carry no information; floor
  // the inference SE there so exact data gives a stable, uninformative test.
  const double rounding_floor =
      1024.0 * std::numeric_limits<double>::epsilon() * std::sqrt(y2 / static_cast<double>(n));
  const double se = std::max(r.residual_se, rounding_floor);

  const double se_slope = se / std::sqrt(sxx);
  const double se_intercept = se * std::sqrt(1.0 / static_cast<double>(n) + xbar * xbar / sxx);
  const double tq = student_t_quantile(0.975, df);
  r.slope_ci95 = {r.slope - tq * se_slope, r.slope + tq * se_slope};
  if (se_intercept > 0.0) {
    r.intercept_p = student_t_two_sided_p(r.intercept / se_intercept, df);
  } else {
    r.intercept_p = r.intercept == 0.0 ? 1.0 : 0.0;
  }
  return r;
}

TTestReport t_test_one_sample(std::span<const double> xs, double mu0) {
  const std::size_t n = xs.size();
  if (n < 2) throw DegenerateInput("t_test: need at least 2 samples");
  require_finite(xs, "xs");
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateInput("t_test: zero sample variance");

  TTestReport r;
  r.n = static_cast<int>(n);
  r.df = r.n - 1;
  r.mean = m;
  r.t = (m - mu0) / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DegenerateInput("pearson: xs and ys differ in length");
  const std::size_t n = xs.size();
  if (n < 3) throw DegenerateInput("pearson: need at least 3 pairs");
  require_finite(xs, "xs");
  require_finite(ys, "ys");
  const double xbar = mean_of(xs);
  const double ybar = mean_of(ys);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - xbar;
    const double dy = ys[i] - ybar;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInput("pearson: zero variance");

  Correlation c;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const int df = static_cast<int>(n) - 2;
  if (std::fabs(c.r) >= 1.0) {
    c.p = 0.0;
  } else {
    c.p = student_t_two_sided_p(c.r * std::sqrt(df / (1.0 - c.r * c.r)), df);
  }
  return c;
}

}  // namespace limner::stats
