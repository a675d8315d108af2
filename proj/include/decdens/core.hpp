#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace decdens {

/// Problem with an input data file (bad value, unparsable line, missing file).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical routine failed to reach its accuracy target or hit a guard.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Ordered sample of strictly positive observations.
class SampleData {
 public:
  explicit SampleData(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  /// Empirical CDF at x: #{X_i <= x} / n.
  double ecdf(double x) const;

  /// Empirical quantile (linear interpolation between order statistics).
  double quantile(double p) const;

 private:
  std::vector<double> values_;  // sorted ascending, all > 0 and finite
};

/// Finite discrete mixing measure on (0, inf): atoms theta_i with weights p_i.
struct MixtureMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;

  void validate() const;  // throws std::invalid_argument on violation
};

/// Right-open piecewise-constant decreasing density on [0, inf):
/// value h_k on (b_{k-1}, b_k] with b_0 = 0, zero beyond b_m.
/// The value at 0 is h_1 by right continuity.
struct StepDensity {
  std::vector<double> breakpoints;  // ascending, positive
  std::vector<double> heights;      // nonincreasing, nonnegative

  void validate() const;

  double operator()(double x) const;
  double at_zero() const { return heights.empty() ? 0.0 : heights.front(); }
  double integral() const;
  double support_end() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }
};

/// Ascending evaluation grid starting at 0.
struct EvalGrid {
  std::vector<double> points;

  void validate() const;
  std::size_t size() const { return points.size(); }

  /// m equally spaced points from 0 to xmax inclusive.
  static EvalGrid regular(double xmax, std::size_t m);
};

/// Density of the scale mixture of uniforms: sum_{i: theta_i >= x} p_i / theta_i.
double mixture_density(const MixtureMeasure& g, double x);

/// Exact step representation of a mixture of uniforms.
/// Equal atoms are merged; breakpoints are the sorted distinct atoms.
StepDensity mixture_to_step(const MixtureMeasure& g);

/// H0(x) = 1 - f(x) / f(0) for a decreasing density f with f(0) > 0.
template <typename F>
  requires std::invocable<F, double>
double inverse_relation(const F& f, double x) {
  const double f0 = f(0.0);
  if (!(f0 > 0.0)) throw NumericError("inverse_relation: degenerate density, f(0) = 0");
  return 1.0 - f(x) / f0;
}

double inverse_relation(const StepDensity& f, double x);

}  // namespace decdens
