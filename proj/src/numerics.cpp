#include "decdens/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "decdens/core.hpp"

namespace decdens {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 15, rel_tol, &error);
  if (!std::isfinite(value))
    throw NumericError("integrate: non-finite result");
  if (error > rel_tol * std::max(std::abs(value), 1e-300) && error > 1e-14)
    throw NumericError("integrate: error estimate " + std::to_string(error) +
                       " misses relative tolerance " + std::to_string(rel_tol));
  return value;
}

double integrate_to_inf(const std::function<double(double)>& f, double a, double rel_tol) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0, l1 = 0.0;
  const double value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(),
                                            rel_tol, &error, &l1);
  if (!std::isfinite(value))
    throw NumericError("integrate_to_inf: non-finite result");
  if (error > 10 * rel_tol && value != 0.0)
    throw NumericError("integrate_to_inf: relative error estimate " + std::to_string(error) +
                       " misses tolerance " + std::to_string(rel_tol));
  return value;
}

double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

double gamma_p_inv(double a, double p) { return boost::math::gamma_p_inv(a, p); }

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty input");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile_sorted: p outside [0,1]");
  const std::size_t n = sorted.size();
  const double h = p * static_cast<double>(n - 1);
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= n) return sorted.back();
  return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need >= 2 matching points");
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

}  // namespace decdens
