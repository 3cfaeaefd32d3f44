#pragma once

#include "becca/core_stats.hpp"
#include "becca/quadrature.hpp"

namespace becca {

/// Marginal prior density of an inclusion probability gamma under
/// gamma ~ Beta(u, v), u, v ~ C+(0,1), by nested quadrature over (u, v).
///
/// The marginal piles up mass near 0 and 1: P(gamma < eps) behaves like
/// (2/pi) / |log eps|. Integrals of it are therefore taken in log-gamma
/// coordinates (see log_gamma_marginal_density).
double becca_marginal_gamma_density(double gamma, double tol);

/// Density of ell = log(gamma) for ell <= -log 2, i.e. gamma * p(gamma)
/// evaluated without ever forming gamma. Relative accuracy `rel_tol`.
double log_gamma_marginal_density(double ell, double rel_tol);

/// Same function served from a lazily built piecewise Chebyshev table
/// (relative accuracy around 1e-9); valid for every ell <= -log 2.
double log_gamma_marginal_density_table(double ell);

/// Density of t = logit(gamma); symmetric in t.
double becca_logit_gamma_density(double t);

/// Integral of the gamma marginal over (0, 1), computed as twice the mass
/// of log(gamma) on (-inf, -log 2].
double becca_marginal_gamma_mass(double tol);

/// Marginal prior density of a coefficient under BECCA with sigma2 = 1,
/// integrating over gamma and g. Returns +inf at beta = 0.
double becca_marginal_beta_density(double beta, double tol);

/// Density of log|beta| under the BECCA marginal (sigma2 = 1).
double becca_log_abs_beta_density(double w, double tol);

/// Integral of the BECCA coefficient marginal over the real line.
double becca_marginal_beta_mass(double tol);

/// Horseshoe marginal of beta, integrating over lambda and tau.
double hs_marginal_beta_density(double beta, double tol);

/// Horseshoe+ marginal of beta, integrating over lambda, eta and tau.
double hsplus_marginal_beta_density(double beta, double tol);

/// Density of log(lambda tau) for independent C+(0,1) scales:
/// 2 r / (pi^2 sinh r).
double log_product_half_cauchy_density(double r);

/// Integral over the real line of a symmetric coefficient marginal,
/// evaluated in log|beta| coordinates.
template <typename Density>
double symmetric_marginal_mass(Density&& density, double tol) {
  auto integrand = [&](double w) {
    const double beta = std::exp(w);
    if (beta == 0.0 || std::isinf(beta)) return 0.0;
    return 2.0 * density(beta) * beta;
  };
  return integrate_1d(integrand, Interval{-std::numeric_limits<double>::infinity(),
                                          std::numeric_limits<double>::infinity()},
                      tol);
}

/// P(lo < gamma < hi) under Beta(u, v), by quadrature.
double beta_interval_mass(double u, double v, double lo, double hi, double tol);

}  // namespace becca
