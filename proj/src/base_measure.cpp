#include "decdens/base_measure.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "decdens/numerics.hpp"

namespace decdens {

std::string to_string(BaseVariant v) {
  switch (v) {
    case BaseVariant::A: return "A";
    case BaseVariant::B: return "B";
    case BaseVariant::C: return "C";
    case BaseVariant::D: return "D";
  }
  return "?";
}

BaseVariant base_variant_from_string(const std::string& s) {
  if (s == "A") return BaseVariant::A;
  if (s == "B") return BaseVariant::B;
  if (s == "C") return BaseVariant::C;
  if (s == "D") return BaseVariant::D;
  throw std::invalid_argument("unknown base measure variant: " + s);
}

void BaseMeasureSpec::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("BaseMeasureSpec: ") + name + " must be positive");
  };
  if (variant == BaseVariant::C) {
    positive(alpha_bar, "alpha_bar");
    positive(tau, "tau");
  } else if (variant == BaseVariant::D) {
    positive(alpha_bar, "alpha_bar");
    positive(lambda, "lambda");
    positive(beta, "beta");
  }
}

BaseMeasureSpec BaseMeasureSpec::A() { return BaseMeasureSpec{BaseVariant::A}; }
BaseMeasureSpec BaseMeasureSpec::B() { return BaseMeasureSpec{BaseVariant::B}; }
BaseMeasureSpec BaseMeasureSpec::C(double alpha_bar, double tau) {
  BaseMeasureSpec s{BaseVariant::C};
  s.alpha_bar = alpha_bar;
  s.tau = tau;
  s.validate();
  return s;
}
BaseMeasureSpec BaseMeasureSpec::D(double alpha_bar, double lambda, double beta) {
  BaseMeasureSpec s{BaseVariant::D};
  s.alpha_bar = alpha_bar;
  s.lambda = lambda;
  s.beta = beta;
  s.validate();
  return s;
}

namespace {

double unnorm_a(double theta) {
  if (theta <= 0.0) return 0.0;
  return std::exp(-theta - 1.0 / theta);
}

// Acceptance ratio bound for the variant-A rejection sampler on y = 1/theta:
// sup_y exp(-y - 1/y) / y <= 0.18. Checked numerically once at startup;
// the analytic maximizer is y = (sqrt(5) - 1) / 2.
constexpr double kRejectionBound = 0.18;

void verify_rejection_bound() {
  const double y_star = (std::sqrt(5.0) - 1.0) / 2.0;
  double sup = std::exp(-y_star - 1.0 / y_star) / y_star;
  for (int i = 1; i <= 2000; ++i) {
    const double y = 5.0 * static_cast<double>(i) / 2000.0;
    sup = std::max(sup, std::exp(-y - 1.0 / y) / y);
  }
  if (sup > kRejectionBound)
    throw NumericError("variant A rejection bound violated: sup = " + std::to_string(sup));
}

}  // namespace

double variant_a_normalizing_constant() {
  static const double c = [] {
    verify_rejection_bound();
    const double v1 = integrate_to_inf([](double t) { return unnorm_a(t); }, 0.0, 1e-10);
    const double v2 = integrate([](double t) { return unnorm_a(t); }, 0.0, 60.0, 1e-10);
    if (std::abs(v1 - v2) > 1e-8 * std::abs(v1))
      throw NumericError("variant A normalizing constant: quadrature schemes disagree");
    return v1;
  }();
  return c;
}

double log_g0(const BaseMeasureSpec& base, double theta, double tau_d) {
  if (theta <= 0.0) return -std::numeric_limits<double>::infinity();
  switch (base.variant) {
    case BaseVariant::A:
      return -theta - 1.0 / theta - std::log(variant_a_normalizing_constant());
    case BaseVariant::B:
      return std::log(theta) - theta;
    case BaseVariant::C:
    case BaseVariant::D: {
      const double tau = base.variant == BaseVariant::C ? base.tau : tau_d;
      if (theta < tau) return -std::numeric_limits<double>::infinity();
      return std::log(base.alpha_bar) + base.alpha_bar * std::log(tau) -
             (base.alpha_bar + 1.0) * std::log(theta);
    }
  }
  return -std::numeric_limits<double>::infinity();
}

namespace {

double marginal_c_form(double x, double alpha_bar, double tau) {
  const double m = std::max(x, tau);
  return alpha_bar * std::pow(tau, alpha_bar) /
         ((alpha_bar + 1.0) * std::pow(m, alpha_bar + 1.0));
}

}  // namespace

double marginal_likelihood(double x, const BaseMeasureSpec& base) {
  if (!(x > 0.0)) throw std::invalid_argument("marginal_likelihood: x must be positive");
  switch (base.variant) {
    case BaseVariant::A: {
      const double c = variant_a_normalizing_constant();
      return integrate_to_inf([](double t) { return unnorm_a(t) / t; }, x, 1e-8) / c;
    }
    case BaseVariant::B:
      return std::exp(-x);
    case BaseVariant::C:
      return marginal_c_form(x, base.alpha_bar, base.tau);
    case BaseVariant::D:
      throw std::invalid_argument(
          "marginal_likelihood: variant D needs the current tau, use marginal_likelihood_given_tau");
  }
  return 0.0;
}

double marginal_likelihood_given_tau(double x, const BaseMeasureSpec& base, double tau_d) {
  if (!(x > 0.0)) throw std::invalid_argument("marginal_likelihood_given_tau: x must be positive");
  if (base.variant == BaseVariant::C) return marginal_c_form(x, base.alpha_bar, base.tau);
  if (base.variant == BaseVariant::D) return marginal_c_form(x, base.alpha_bar, tau_d);
  return marginal_likelihood(x, base);
}

double theta_b_inverse_cdf(double x, double u) { return x - std::log(u); }

double pareto_inverse_cdf(double shape, double scale, double u) {
  return scale * std::pow(u, -1.0 / shape);
}

double sample_theta_new(double x, const BaseMeasureSpec& base, RngStream& rng, double tau_d) {
  if (!(x > 0.0)) throw std::invalid_argument("sample_theta_new: x must be positive");
  switch (base.variant) {
    case BaseVariant::A: {
      // Rejection on y = 1/theta: target density proportional to
      // y^{-1} exp(-y - 1/y) on (0, 1/x], uniform proposal.
      variant_a_normalizing_constant();  // runs the 0.18 bound check once
      for (long attempt = 0; attempt < 1'000'000; ++attempt) {
        const double y = rng.uniform01() / x;
        const double u = rng.uniform01();
        if (u <= std::exp(-y - 1.0 / y) / (kRejectionBound * y)) return 1.0 / y;
      }
      throw NumericError("sample_theta_new: rejection sampler exceeded 1e6 iterations at x = " +
                         std::to_string(x));
    }
    case BaseVariant::B:
      return theta_b_inverse_cdf(x, rng.uniform01());
    case BaseVariant::C:
      return pareto_inverse_cdf(base.alpha_bar + 1.0, std::max(base.tau, x), rng.uniform01());
    case BaseVariant::D:
      return pareto_inverse_cdf(base.alpha_bar + 1.0, std::max(tau_d, x), rng.uniform01());
  }
  throw std::logic_error("sample_theta_new: unreachable");
}

double update_tau_variant_d(std::span<const double> thetas, const BaseMeasureSpec& base,
                            RngStream& rng) {
  if (thetas.empty()) throw std::invalid_argument("update_tau_variant_d: empty thetas");
  const double bound = *std::min_element(thetas.begin(), thetas.end());
  const double a = base.lambda + static_cast<double>(thetas.size()) * base.alpha_bar;
  const double u = rng.uniform01();
  const double mass = gamma_p(a, base.beta * bound);
  if (mass > 0.0) return gamma_p_inv(a, u * mass) / base.beta;
  // Far-left tail: the Gamma density is effectively t^{a-1} on [0, bound].
  return bound * std::pow(u, 1.0 / a);
}

}  // namespace decdens
