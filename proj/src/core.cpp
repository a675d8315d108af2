#include "decdens/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace decdens {

SampleData::SampleData(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("SampleData: empty sample");
  for (double v : values_) {
    if (!std::isfinite(v) || v <= 0.0)
      throw std::invalid_argument("SampleData: values must be finite and strictly positive");
  }
  std::sort(values_.begin(), values_.end());
}

double SampleData::ecdf(double x) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double SampleData::quantile(double p) const {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("SampleData::quantile: p outside [0,1]");
  const std::size_t n = values_.size();
  const double h = p * static_cast<double>(n - 1);
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= n) return values_.back();
  return values_[i] + (h - static_cast<double>(i)) * (values_[i + 1] - values_[i]);
}

void MixtureMeasure::validate() const {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("MixtureMeasure: atoms/weights must be nonempty and same length");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] > 0.0) || !std::isfinite(atoms[i]))
      throw std::invalid_argument("MixtureMeasure: atoms must be finite and positive");
    if (weights[i] < 0.0 || !std::isfinite(weights[i]))
      throw std::invalid_argument("MixtureMeasure: weights must be finite and nonnegative");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureMeasure: weights must sum to 1 within 1e-12");
}

void StepDensity::validate() const {
  if (breakpoints.empty() || breakpoints.size() != heights.size())
    throw std::invalid_argument("StepDensity: breakpoints/heights must be nonempty and same length");
  double prev_b = 0.0;
  double prev_h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > prev_b))
      throw std::invalid_argument("StepDensity: breakpoints must be ascending and positive");
    if (heights[i] < 0.0 || heights[i] > prev_h + 1e-12)
      throw std::invalid_argument("StepDensity: heights must be nonincreasing and nonnegative");
    prev_b = breakpoints[i];
    prev_h = heights[i];
  }
  if (std::abs(integral() - 1.0) > 1e-10)
    throw std::invalid_argument("StepDensity: density must integrate to 1 within 1e-10");
}

double StepDensity::operator()(double x) const {
  // Value on (b_{k-1}, b_k]; right continuity at 0.
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
  if (it == breakpoints.end()) return 0.0;
  return heights[static_cast<std::size_t>(it - breakpoints.begin())];
}

double StepDensity::integral() const {
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    total += heights[i] * (breakpoints[i] - prev);
    prev = breakpoints[i];
  }
  return total;
}

void EvalGrid::validate() const {
  if (points.empty() || points.front() != 0.0)
    throw std::invalid_argument("EvalGrid: first point must be 0");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1]))
      throw std::invalid_argument("EvalGrid: points must be strictly ascending");
}

EvalGrid EvalGrid::regular(double xmax, std::size_t m) {
  if (m < 2 || !(xmax > 0.0)) throw std::invalid_argument("EvalGrid::regular: need m >= 2, xmax > 0");
  EvalGrid g;
  g.points.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    g.points[i] = xmax * static_cast<double>(i) / static_cast<double>(m - 1);
  g.points.front() = 0.0;
  return g;
}

double mixture_density(const MixtureMeasure& g, double x) {
  if (x < 0.0) throw std::invalid_argument("mixture_density: x must be nonnegative");
  double total = 0.0;
  for (std::size_t i = 0; i < g.atoms.size(); ++i)
    if (g.atoms[i] >= x) total += g.weights[i] / g.atoms[i];
  return total;
}

StepDensity mixture_to_step(const MixtureMeasure& g) {
  std::vector<std::size_t> order(g.atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return g.atoms[a] < g.atoms[b]; });

  StepDensity out;
  std::vector<double> merged_weight;
  for (std::size_t idx : order) {
    if (!out.breakpoints.empty() && g.atoms[idx] == out.breakpoints.back()) {
      merged_weight.back() += g.weights[idx];
    } else {
      out.breakpoints.push_back(g.atoms[idx]);
      merged_weight.push_back(g.weights[idx]);
    }
  }
  // Height on (b_{j-1}, b_j] is the suffix sum of weight/atom.
  out.heights.resize(out.breakpoints.size());
  double acc = 0.0;
  for (std::size_t j = out.breakpoints.size(); j-- > 0;) {
    acc += merged_weight[j] / out.breakpoints[j];
    out.heights[j] = acc;
  }
  return out;
}

double inverse_relation(const StepDensity& f, double x) {
  return inverse_relation([&f](double t) { return f(t); }, x);
}

}  // namespace decdens
