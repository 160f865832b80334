#pragma once

// Test-side oracles, kept independent of the library code paths they check:
// quadrature-based special functions, goodness-of-fit statistics, and small
// summary helpers. Everything here is deliberately slow and simple.

#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol);

// Gamma function evaluated from its integral definition (no Lanczos),
// accurate to ~1e-12 for a in (0, 6].
double gamma_integral(double a);

// Regularized lower incomplete gamma P(a, x) via series / continued fraction.
double reg_lower_gamma(double a, double x);

double gamma_cdf(double shape, double x);   // unit scale
double chi2_cdf(double df, double x);
double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov statistic of `sample` against `cdf`.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b);

// Critical values from the asymptotic Kolmogorov distribution.
double ks_critical(double alpha, std::size_t n);
double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

Summary summarize(const std::vector<double>& v);

double covariance(const std::vector<double>& a, const std::vector<double>& b);
double correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace oracle
