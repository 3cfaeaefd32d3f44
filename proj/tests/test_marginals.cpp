#include <doctest.h>

#include <cmath>
#include <numbers>

#include "becca/marginals.hpp"
#include "test_util.hpp"

using namespace becca;

namespace {

constexpr double kPi = std::numbers::pi;

double half_cauchy(RngStream& rng) { return std::abs(std::tan(kPi * (rng.uniform() - 0.5))); }

struct McEstimate {
  double mean;
  double se;
};

template <typename F>
McEstimate monte_carlo(long draws, F&& sample) {
  double sum = 0, sum2 = 0;
  for (long i = 0; i < draws; ++i) {
    const double x = sample();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / draws;
  return {mean, std::sqrt((sum2 / draws - mean * mean) / draws)};
}

double normal_density(double x, double var) { return std::exp(-0.5 * x * x / var) / std::sqrt(2 * kPi * var); }

}  // namespace

TEST_CASE("gamma marginal is symmetric") {
  RngStream rng(1, 0);
  for (int i = 0; i < 10; ++i) {
    const double g = rng.uniform(0.01, 0.99);
    CHECK(becca_marginal_gamma_density(g, 1e-8) ==
          doctest::Approx(becca_marginal_gamma_density(1 - g, 1e-8)).epsilon(1e-6));
  }
  for (double g : {0.0001, 0.001, 0.01, 0.05}) {
    CAPTURE(g);
    CHECK(becca_marginal_gamma_density(g, 1e-10) ==
          doctest::Approx(becca_marginal_gamma_density(1 - g, 1e-10)).epsilon(1e-8));
  }
  for (double g : {0.3, 0.7}) CHECK(becca_marginal_gamma_density(g, 1e-8) == doctest::Approx(0.547051).epsilon(1e-5));
}

TEST_CASE("gamma marginal integrates to one") {
  CHECK(becca_marginal_gamma_mass(1e-7) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gamma marginal agrees with a Monte Carlo oracle") {
  RngStream rng(2, 0);
  const auto mc = monte_carlo(1000000, [&] {
    const double u = half_cauchy(rng), v = half_cauchy(rng);
    return std::exp(log_beta_pdf(0.5, u, v));
  });
  const double quad = becca_marginal_gamma_density(0.5, 1e-8);
  CHECK(std::abs(quad - mc.mean) < 3 * mc.se);
}

TEST_CASE("log-gamma representations agree") {
  for (double ell : {-0.7, -2.0, -10.0, -100.0, -1e4}) {
    const double direct = log_gamma_marginal_density(ell, 1e-10);
    CHECK(log_gamma_marginal_density_table(ell) == doctest::Approx(direct).epsilon(1e-8));
  }
  const double g = 0.2;
  CHECK(log_gamma_marginal_density(std::log(g), 1e-10) / g ==
        doctest::Approx(becca_marginal_gamma_density(g, 1e-10)).epsilon(1e-7));
  // The logit-scale density is gamma (1 - gamma) p(gamma).
  const double t = std::log(g / (1 - g));
  CHECK(becca_logit_gamma_density(t) == doctest::Approx(g * (1 - g) * becca_marginal_gamma_density(g, 1e-10)).epsilon(1e-7));
  CHECK(becca_logit_gamma_density(t) == doctest::Approx(becca_logit_gamma_density(-t)).epsilon(1e-12));
  // Far tail: ell^2 q(ell) tends to 2/pi.
  CHECK(1e8 * log_gamma_marginal_density_table(-1e4) == doctest::Approx(2 / kPi).epsilon(1e-2));
}

TEST_CASE("beta marginal shape and symmetry") {
  RngStream rng(3, 0);
  for (int i = 0; i < 10; ++i) {
    const double b = rng.uniform(0.05, 6);
    CHECK(becca_marginal_beta_density(b, 1e-8) ==
          doctest::Approx(becca_marginal_beta_density(-b, 1e-8)).epsilon(1e-10));
  }
  const double p5 = becca_marginal_beta_density(5, 1e-8), p1 = becca_marginal_beta_density(1, 1e-8),
               p01 = becca_marginal_beta_density(0.1, 1e-8);
  CHECK(p5 <= p1);
  CHECK(p1 <= p01);
  CHECK(std::isinf(becca_marginal_beta_density(0.0, 1e-8)));
}

TEST_CASE("beta marginal integrates to one") {
  CHECK(becca_marginal_beta_mass(1e-6) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("beta marginals agree with Monte Carlo oracles") {
  RngStream rng(4, 0);
  const double b = 0.5;
  const auto becca_mc = monte_carlo(1000000, [&] {
    const double u = half_cauchy(rng), v = half_cauchy(rng), g = half_cauchy(rng);
    // Beta draw from log-gamma variates: log G(a) = log G(a + 1) + log(U) / a.
    std::gamma_distribution<double> ga(u + 1.0, 1.0), gb(v + 1.0, 1.0);
    const double lx = std::log(ga(rng)) + std::log(rng.uniform(0, 1)) / u;
    const double ly = std::log(gb(rng)) + std::log(rng.uniform(0, 1)) / v;
    const double log_gamma = log_inv_logit(lx - ly);
    const double log_var = std::log(g) + 2 * log_gamma;
    return std::exp(-0.5 * std::log(2 * kPi) - 0.5 * log_var - 0.5 * b * b * std::exp(-log_var));
  });
  CHECK(std::abs(becca_marginal_beta_density(b, 1e-8) - becca_mc.mean) < 3 * becca_mc.se);

  const auto hs_mc = monte_carlo(1000000, [&] {
    const double s = half_cauchy(rng) * half_cauchy(rng);
    return normal_density(b, s * s);
  });
  CHECK(std::abs(hs_marginal_beta_density(b, 1e-8) - hs_mc.mean) < 3 * hs_mc.se);

  const auto hsp_mc = monte_carlo(1000000, [&] {
    const double s = half_cauchy(rng) * half_cauchy(rng) * half_cauchy(rng);
    return normal_density(b, s * s);
  });
  CHECK(std::abs(hsplus_marginal_beta_density(b, 1e-8) - hsp_mc.mean) < 3 * hsp_mc.se);
}

TEST_CASE("horseshoe marginals integrate to one") {
  CHECK(symmetric_marginal_mass([](double x) { return hs_marginal_beta_density(x, 1e-10); }, 1e-7) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(symmetric_marginal_mass([](double x) { return hsplus_marginal_beta_density(x, 1e-10); }, 1e-7) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(integrate_1d(log_product_half_cauchy_density, {-std::numeric_limits<double>::infinity(),
                                                       std::numeric_limits<double>::infinity()},
                     1e-10) == doctest::Approx(1.0).epsilon(1e-8));
}
