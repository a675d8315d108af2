#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace decdens {

/// Adaptive quadrature over [a, b] with a relative error target.
/// Throws NumericError when the error estimate misses the target.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol);

/// Adaptive quadrature over [a, inf).
double integrate_to_inf(const std::function<double(double)>& f, double a, double rel_tol);

/// Regularized lower incomplete gamma P(a, x) and its inverse in x.
double gamma_p(double a, double x);
double gamma_p_inv(double a, double p);

/// Empirical quantile with linear interpolation between order statistics
/// (median of an even count is the midpoint). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

double mean_of(std::span<const double> v);
/// Population variance (divide by N).
double variance_of(std::span<const double> v);

/// Least-squares slope of log(y) on log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace decdens
