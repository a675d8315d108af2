#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "decdens/core.hpp"
#include "decdens/sampler.hpp"

namespace decdens {

/// Least concave majorant of a point set: piecewise linear, concave, lies on
/// or above every input point and touches it at every knot.
struct ConcaveMajorant {
  std::vector<double> xs;  // knot abscissae, ascending, xs[0] = 0
  std::vector<double> ys;  // knot ordinates, ys[0] = 0
  double operator()(double x) const;
  std::vector<double> slopes() const;  // slope of segment ending at knot i (i >= 1)
};

/// Monotone-chain upper hull of points with strictly ascending x starting at
/// (0,0) and nondecreasing y. O(n).
ConcaveMajorant least_concave_majorant(std::span<const double> xs, std::span<const double> ys);

/// Grenander estimator: left-continuous derivative of the least concave
/// majorant of the empirical CDF. Duplicate observations merge into a single
/// ECDF jump of multiplicity/n.
StepDensity grenander(const SampleData& data);

/// First slope of the ECDF majorant, max_i F_n(X_i) / X_i.
double grenander_at_zero(const SampleData& data);

/// Solves gamma = min_{1<=s<=n} { 1 - (alpha s / n) / (alpha + gamma x_s) }
/// for the positive fixed point (bisection; returns 1 exactly at alpha = 0,
/// 0 when alpha >= x_n leaves only the trivial fixed point).
double solve_gamma(const SampleData& data, double alpha);

struct PenalizedFit {
  StepDensity density;  // on the x axis
  double gamma = 1.0;
  double at_zero = 0.0;  // (1 - gamma) / alpha for alpha > 0
};

/// Penalized maximum likelihood estimator: concave majorant of the ECDF of
/// the transformed points w_k = alpha + gamma x_k, mapped back to x.
/// Requires 0 <= alpha < max observation.
PenalizedFit penalized_mle(const SampleData& data, double alpha);

struct PenaltyTuning {
  double alpha_n = 0.0;
  double beta_hat = 0.0;
};

/// Data-driven penalty alpha_n = 0.649 * beta_hat^{-1/3} * n^{-2/3} from a
/// pilot fit at alpha0. With fewer than two jumps in the pilot the curvature
/// estimate falls back to the floor n^{-1/3}.
PenaltyTuning penalized_alpha_n(const SampleData& data, double alpha0);

/// Pilot penalty: the published values for n = 50 and 200, otherwise the
/// unit-curvature rate 0.649 * n^{-2/3}.
double default_alpha0(std::size_t n);

/// f_hat(n^{-1/3}).
double simple_estimator(const SampleData& data);

struct AdaptiveResult {
  double estimate = 0.0;
  double b21_hat = 0.0;
  double fprime_hat = 0.0;
};

/// f_hat evaluated at 0.345 * B21_hat * n^{-1/3} with the plug-in curvature
/// estimate B21_hat = 4^{1/3} fS^{1/3} |fprime|^{-2/3}.
AdaptiveResult adaptive_estimator(const SampleData& data);

struct HistogramResult {
  double estimate = 0.0;
  double b_hat = 0.0;
};

/// F_n(b_hat) / b_hat with the MSE-optimal bin width 2^{-1/3} B21_hat n^{-1/3}.
HistogramResult histogram_estimator(const SampleData& data);

/// Histogram value at a forced bin width (test hook).
double histogram_at(const SampleData& data, double b);

struct ZeroTuning {
  double alpha0 = 0.0;
  double alpha_n = 0.0;
  double beta_hat = 0.0;
  double b21_hat = 0.0;
  double b_hat = 0.0;
  double fprime_hat = 0.0;
};

/// The estimator quintet at zero plus every tuning intermediate.
struct ZeroEstimates {
  double grenander0 = 0.0;
  double penalized0 = 0.0;
  double simple0 = 0.0;
  double adaptive0 = 0.0;
  double histogram0 = 0.0;
  std::optional<double> bayes0;  // posterior median at 0, present when a chain ran
  ZeroTuning tuning;
};

/// Runs all estimators on one sample (n >= 2). The Bayesian entry runs only
/// when a sampler configuration is supplied. `alpha0` overrides the pilot
/// penalty choice.
ZeroEstimates estimate_all_zero(const SampleData& data,
                                const std::optional<SamplerConfig>& bayes_config,
                                std::optional<double> alpha0 = std::nullopt);

}  // namespace decdens
