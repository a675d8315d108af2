#pragma once

#include <string>

#include "decdens/core.hpp"
#include "decdens/rng.hpp"

namespace decdens {

enum class BaseVariant { A, B, C, D };

std::string to_string(BaseVariant v);
BaseVariant base_variant_from_string(const std::string& s);

/// Base measure G0 of the Dirichlet process prior.
///   A: g0(theta) proportional to exp(-theta - 1/theta)
///   B: Gamma(2,1), g0(theta) = theta * exp(-theta)
///   C: Pareto(alpha_bar, tau)
///   D: Pareto(alpha_bar, tau) with tau ~ Gamma(lambda, beta) updated by Gibbs
struct BaseMeasureSpec {
  BaseVariant variant = BaseVariant::A;
  double alpha_bar = 1.0;  // C, D
  double tau = 0.5;        // C
  double lambda = 2.0;     // D
  double beta = 1.0;       // D

  void validate() const;

  static BaseMeasureSpec A();
  static BaseMeasureSpec B();
  static BaseMeasureSpec C(double alpha_bar, double tau);
  static BaseMeasureSpec D(double alpha_bar, double lambda, double beta);
};

/// Normalizing constant of variant A's density, integral of exp(-t - 1/t)
/// over (0, inf). Computed once by two independent quadrature schemes that
/// must agree to 1e-8.
double variant_a_normalizing_constant();

/// log g0(theta), normalized. For variant D, `tau_d` is the current value of
/// the latent tau (the density conditional on tau equals variant C's).
double log_g0(const BaseMeasureSpec& base, double theta, double tau_d = 0.0);

/// Marginal density of one observation under the base measure:
/// integral over theta >= x of g0(theta)/theta. Closed form for B and C;
/// adaptive quadrature (relative tolerance 1e-8) for A. Variant D requires
/// the conditional form below.
double marginal_likelihood(double x, const BaseMeasureSpec& base);

/// Variant D conditional on the current tau (same closed form as C).
double marginal_likelihood_given_tau(double x, const BaseMeasureSpec& base, double tau_d);

/// Draws from the single-observation posterior g0(theta) * psi(x | theta),
/// i.e. the theta for a freshly created cluster. Exact for every variant:
/// rejection sampling for A, inverse CDF for B, Pareto inverse CDF for C/D.
double sample_theta_new(double x, const BaseMeasureSpec& base, RngStream& rng, double tau_d = 0.0);

/// Inverse-CDF kernels, exposed for direct checks.
double theta_b_inverse_cdf(double x, double u);                       // x - log(u)
double pareto_inverse_cdf(double shape, double scale, double u);     // scale * u^(-1/shape)

/// Gibbs update of variant D's tau given the current cluster scales:
/// Gamma(lambda + K * alpha_bar, beta) truncated to [0, min(thetas)],
/// drawn by inverse CDF on the regularized incomplete gamma.
double update_tau_variant_d(std::span<const double> thetas, const BaseMeasureSpec& base,
                            RngStream& rng);

}  // namespace decdens
