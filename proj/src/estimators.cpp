#include "decdens/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decdens/numerics.hpp"

namespace decdens {

double ConcaveMajorant::operator()(double x) const {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

std::vector<double> ConcaveMajorant::slopes() const {
  std::vector<double> s(xs.size() - 1);
  for (std::size_t i = 1; i < xs.size(); ++i)
    s[i - 1] = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
  return s;
}

namespace {

// Upper hull over point indices; collinear interior points are dropped so the
// knot slopes are strictly decreasing.
std::vector<std::size_t> upper_hull(std::span<const double> xs, std::span<const double> ys) {
  std::vector<std::size_t> hull;
  for (std::size_t c = 0; c < xs.size(); ++c) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull[hull.size() - 1];
      // pop b when slope(b,c) >= slope(a,b)
      if ((ys[c] - ys[b]) * (xs[b] - xs[a]) >= (ys[b] - ys[a]) * (xs[c] - xs[b]))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(c);
  }
  return hull;
}

struct MergedEcdf {
  std::vector<double> xs;  // distinct values, ascending, xs[0] = 0
  std::vector<double> ys;  // cumulative fractions, ys[0] = 0
};

MergedEcdf merged_ecdf(std::span<const double> sorted_values) {
  MergedEcdf e;
  e.xs.push_back(0.0);
  e.ys.push_back(0.0);
  const double n = static_cast<double>(sorted_values.size());
  std::size_t i = 0;
  while (i < sorted_values.size()) {
    std::size_t j = i;
    while (j < sorted_values.size() && sorted_values[j] == sorted_values[i]) ++j;
    e.xs.push_back(sorted_values[i]);
    e.ys.push_back(static_cast<double>(j) / n);
    i = j;
  }
  return e;
}

// Decreasing step density read off a hull of ECDF-like points whose first
// point is the origin. Breakpoints are taken from `axis` (the x positions the
// density lives on), heights from the hull slopes over (hx, hy).
StepDensity density_from_hull(const std::vector<std::size_t>& hull, std::span<const double> hx,
                              std::span<const double> hy, std::span<const double> axis) {
  StepDensity d;
  d.breakpoints.reserve(hull.size() - 1);
  d.heights.reserve(hull.size() - 1);
  for (std::size_t k = 1; k < hull.size(); ++k) {
    const std::size_t a = hull[k - 1];
    const std::size_t b = hull[k];
    d.breakpoints.push_back(axis[b]);
    d.heights.push_back((hy[b] - hy[a]) / (hx[b] - hx[a]));
  }
  return d;
}

}  // namespace

ConcaveMajorant least_concave_majorant(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("least_concave_majorant: need >= 2 matching points");
  if (xs[0] != 0.0 || ys[0] != 0.0)
    throw std::invalid_argument("least_concave_majorant: points must start at (0,0)");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument("least_concave_majorant: x must be strictly ascending");
    if (ys[i] < ys[i - 1])
      throw std::invalid_argument("least_concave_majorant: y must be nondecreasing");
  }
  const std::vector<std::size_t> hull = upper_hull(xs, ys);
  ConcaveMajorant m;
  m.xs.reserve(hull.size());
  m.ys.reserve(hull.size());
  for (std::size_t i : hull) {
    m.xs.push_back(xs[i]);
    m.ys.push_back(ys[i]);
  }
  return m;
}

StepDensity grenander(const SampleData& data) {
  const MergedEcdf e = merged_ecdf(data.values());
  const std::vector<std::size_t> hull = upper_hull(e.xs, e.ys);
  return density_from_hull(hull, e.xs, e.ys, e.xs);
}

double grenander_at_zero(const SampleData& data) {
  double best = 0.0;
  const double n = static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    best = std::max(best, (static_cast<double>(i) + 1.0) / (n * data[i]));
  return best;
}

double solve_gamma(const SampleData& data, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("solve_gamma: alpha must be >= 0");
  if (alpha == 0.0) return 1.0;
  const auto& x = data.values();
  const double n = static_cast<double>(x.size());
  const auto psi = [&](double g) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < x.size(); ++s) {
      const double term =
          1.0 - (alpha * (static_cast<double>(s) + 1.0) / n) / (alpha + g * x[s]);
      m = std::min(m, term);
    }
    return m;
  };
  if (psi(1.0) - 1.0 > 0.0)
    throw NumericError("solve_gamma: fixed-point bracket failed (invalid input)");
  // psi is concave and increasing with psi(0) = 0, so h = psi - id is
  // positive below the nonzero fixed point and negative above it.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi(mid) - mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

PenalizedFit penalized_mle(const SampleData& data, double alpha) {
  if (alpha < 0.0 || alpha >= data.max())
    throw std::invalid_argument("penalized_mle: need 0 <= alpha < max observation");
  PenalizedFit fit;
  fit.gamma = solve_gamma(data, alpha);
  if (!(fit.gamma > 0.0))
    throw NumericError("penalized_mle: degenerate gamma = 0");

  const MergedEcdf e = merged_ecdf(data.values());
  std::vector<double> w(e.xs.size());
  w[0] = 0.0;
  for (std::size_t i = 1; i < e.xs.size(); ++i) w[i] = alpha + fit.gamma * e.xs[i];
  const std::vector<std::size_t> hull = upper_hull(w, e.ys);
  fit.density = density_from_hull(hull, w, e.ys, e.xs);
  fit.at_zero = alpha > 0.0 ? (1.0 - fit.gamma) / alpha : fit.density.at_zero();
  return fit;
}

double default_alpha0(std::size_t n) {
  if (n == 50) return 0.0516;
  if (n == 200) return 0.0205;
  return 0.649 * std::pow(static_cast<double>(n), -2.0 / 3.0);
}

PenaltyTuning penalized_alpha_n(const SampleData& data, double alpha0) {
  const double n = static_cast<double>(data.size());
  const double floor = std::pow(n, -1.0 / 3.0);
  const PenalizedFit pilot = penalized_mle(data, alpha0);
  PenaltyTuning t;
  t.beta_hat = floor;
  if (pilot.density.breakpoints.size() >= 2) {
    const double xm = pilot.density.breakpoints[1];  // second point of jump
    const double f0 = pilot.at_zero;
    const double fxm = pilot.density.heights[1];
    t.beta_hat = std::max(f0 * (f0 - fxm) / (2.0 * xm), floor);
  }
  t.alpha_n = 0.649 * std::pow(t.beta_hat, -1.0 / 3.0) * std::pow(n, -2.0 / 3.0);
  return t;
}

double simple_estimator(const SampleData& data) {
  return grenander(data)(std::pow(static_cast<double>(data.size()), -1.0 / 3.0));
}

AdaptiveResult adaptive_estimator(const SampleData& data) {
  const double n = static_cast<double>(data.size());
  const StepDensity fhat = grenander(data);
  const double f_simple = fhat(std::pow(n, -1.0 / 3.0));
  AdaptiveResult r;
  r.fprime_hat = std::min(
      std::pow(n, 1.0 / 6.0) * (fhat(std::pow(n, -1.0 / 6.0)) - fhat(std::pow(n, -1.0 / 3.0))),
      -std::pow(n, -1.0 / 3.0));
  r.b21_hat = std::cbrt(4.0) * std::cbrt(f_simple) * std::pow(-r.fprime_hat, -2.0 / 3.0);
  r.estimate = fhat(0.345 * r.b21_hat * std::pow(n, -1.0 / 3.0));
  return r;
}

double histogram_at(const SampleData& data, double b) {
  if (!(b > 0.0)) return 0.0;  // degenerate bandwidth (tiny-n corner)
  return data.ecdf(b) / b;
}

HistogramResult histogram_estimator(const SampleData& data) {
  const AdaptiveResult a = adaptive_estimator(data);
  HistogramResult h;
  h.b_hat = std::pow(0.5, 1.0 / 3.0) * a.b21_hat *
            std::pow(static_cast<double>(data.size()), -1.0 / 3.0);
  h.estimate = histogram_at(data, h.b_hat);
  return h;
}

ZeroEstimates estimate_all_zero(const SampleData& data,
                                const std::optional<SamplerConfig>& bayes_config,
                                std::optional<double> alpha0) {
  if (data.size() < 2) throw std::invalid_argument("estimate_all_zero: need n >= 2");
  ZeroEstimates z;
  z.grenander0 = grenander(data).at_zero();
  z.tuning.alpha0 = alpha0.value_or(default_alpha0(data.size()));
  const PenaltyTuning t = penalized_alpha_n(data, z.tuning.alpha0);
  z.tuning.alpha_n = t.alpha_n;
  z.tuning.beta_hat = t.beta_hat;
  z.penalized0 = penalized_mle(data, t.alpha_n).at_zero;
  z.simple0 = simple_estimator(data);
  const AdaptiveResult a = adaptive_estimator(data);
  z.adaptive0 = a.estimate;
  z.tuning.b21_hat = a.b21_hat;
  z.tuning.fprime_hat = a.fprime_hat;
  const HistogramResult h = histogram_estimator(data);
  z.histogram0 = h.estimate;
  z.tuning.b_hat = h.b_hat;
  if (bayes_config) {
    GibbsSampler sampler(data, *bayes_config);
    const RunResult run = sampler.run();
    std::vector<double> at_zero = draw_values_at_zero(run.draws);
    std::sort(at_zero.begin(), at_zero.end());
    z.bayes0 = quantile_sorted(at_zero, 0.5);
  }
  return z;
}

}  // namespace decdens
