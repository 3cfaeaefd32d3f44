#include <doctest.h>

#include "becca/marginals.hpp"
#include "becca/quadrature.hpp"
#include "test_util.hpp"

using namespace becca;

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Empty data turns the posterior target into the unconstrained prior.
PosteriorTarget prior_target(PriorKind prior, Index p, ModelKind model, double a_dl = 0.0) {
  Dataset d;
  d.X.resize(0, p);
  d.y.resize(0);
  TargetOptions o;
  o.model = model;
  o.prior = prior;
  o.param = Parameterization::centered;
  o.a_dl = a_dl;
  return PosteriorTarget(d, o);
}

VectorXd random_point(Index dim, RngStream& rng, double sd = 1.0) {
  VectorXd z(dim);
  for (Index i = 0; i < dim; ++i) z(i) = sd * rng.normal();
  return z;
}

// The constrained-scale prior at z plus the transform log-Jacobian.
double direct_prior(const PosteriorTarget& t, const VectorXd& z) {
  const Index p = t.p();
  const VectorXd c = t.constrain(z);
  const bool lin = t.has_sigma2();
  const double sigma2 = lin ? c(c.size() - 1) : 1.0;
  const Index h = t.hierarchy().hyper_size();
  double jac = to_constrained(z.segment(p, h), t.hierarchy().layout()).log_jacobian;
  if (lin) jac += z(z.size() - 1);
  const VectorXd beta = c.head(p);
  switch (t.options().prior) {
    case PriorKind::becca: {
      BeccaState s{beta, c.segment(p, p), c(2 * p), c(2 * p + 1), c(2 * p + 2), sigma2};
      return becca_log_prior(s, lin, 0.5, 0.5) + jac;
    }
    case PriorKind::hs:
    case PriorKind::hsplus: {
      const bool plus = t.options().prior == PriorKind::hsplus;
      HorseshoeState s{beta, c.segment(p, p), c(2 * p), plus ? VectorXd(c.segment(2 * p + 1, p)) : VectorXd(),
                       sigma2};
      return hs_log_prior(s, plus, lin, 0.5, 0.5) + jac;
    }
    case PriorKind::dl: {
      DirichletLaplaceState s{beta, c.segment(p, p), c.segment(2 * p, p), c(3 * p), 1.0 / static_cast<double>(p),
                              sigma2};
      return dl_log_prior(s, lin, 0.5, 0.5) + jac;
    }
  }
  return 0.0;
}

}  // namespace

TEST_CASE("becca_log_prior closed form") {
  BeccaState s{VectorXd::Zero(1), VectorXd::Constant(1, 0.5), 1.0, 1.0, 1.0, 1.0};
  // log N(0; 0, 0.25) + log Beta(0.5; 1, 1) + 3 log C+(1) + log IG(1; 0.5, 0.5)
  const double normal = -0.5 * std::log(2 * std::numbers::pi * 0.25);
  const double cauchy_at_one = -std::log(std::numbers::pi);
  const double expected = normal + 3 * cauchy_at_one + log_inv_gamma_pdf(1.0, 0.5, 0.5);
  CHECK(normal == doctest::Approx(-0.225791).epsilon(1e-6));
  CHECK(becca_log_prior(s, true, 0.5, 0.5) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(becca_log_prior(s, true, 0.5, 0.5) == doctest::Approx(-5.078920).epsilon(1e-6));
  // Without sigma2 the IG term is dropped and the variance is g gamma^2.
  CHECK(becca_log_prior(s, false, 0.5, 0.5) == doctest::Approx(normal + 3 * cauchy_at_one).epsilon(1e-12));
  // At the origin of every scale the half-Cauchy terms are log(2/pi) each.
  BeccaState tiny{VectorXd::Zero(1), VectorXd::Constant(1, 0.5), 1e-200, 1e-200, 1e-200, 1.0};
  const double at_zero = becca_log_prior(tiny, false, 0.5, 0.5) + 0.5 * std::log(1e-200 * 0.25) + kHalfLogTwoPi;
  const double beta_term = log_beta_pdf(0.5, 1e-200, 1e-200);
  CHECK(at_zero - beta_term == doctest::Approx(3 * kLogTwoOverPi).epsilon(1e-10));
}

TEST_CASE("becca_log_prior with vanishing gamma") {
  for (double gamma : {1e-10, 1e-100, 1e-300, 4.9e-324}) {
    BeccaState s{VectorXd::Constant(1, 0.7), VectorXd::Constant(1, gamma), 1.0, 1.0, 1.0, 1.0};
    const double lp = becca_log_prior(s, true, 0.5, 0.5);
    CHECK_FALSE(std::isnan(lp));
    CHECK(lp < -1e15);
  }
}

TEST_CASE("hs_log_prior closed form") {
  HorseshoeState s{VectorXd::Zero(1), VectorXd::Ones(1), 1.0, VectorXd(), 1.0};
  CHECK(hs_log_prior(s, false, false, 0.5, 0.5) == doctest::Approx(-3.208398).epsilon(1e-6));
  CHECK(hs_log_prior(s, false, false, 0.5, 0.5) ==
        doctest::Approx(-0.5 * kLog2Pi - 2 * std::log(std::numbers::pi)).epsilon(1e-14));

  RngStream rng(4, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Index p = 4;
    HorseshoeState h{random_point(p, rng), random_point(p, rng).array().exp(), std::exp(rng.normal()), VectorXd(),
                     1.3};
    HorseshoeState plus = h;
    plus.eta = VectorXd::Ones(p);
    CHECK(hs_log_prior(plus, true, true, 0.5, 0.5) ==
          doctest::Approx(hs_log_prior(h, false, true, 0.5, 0.5) - p * std::log(std::numbers::pi)).epsilon(1e-12));
  }
}

TEST_CASE("hs+ with eta pinned at one differs from hs by a constant in beta") {
  RngStream rng(12, 0);
  const Index p = 3;
  HorseshoeState h{VectorXd::Zero(p), VectorXd::Constant(p, 0.7), 0.4, VectorXd(), 1.0};
  HorseshoeState plus = h;
  plus.eta = VectorXd::Ones(p);
  const double base = hs_log_prior(plus, true, false, 0.5, 0.5) - hs_log_prior(h, false, false, 0.5, 0.5);
  for (int rep = 0; rep < 10; ++rep) {
    h.beta = plus.beta = 3 * random_point(p, rng);
    CHECK(hs_log_prior(plus, true, false, 0.5, 0.5) - hs_log_prior(h, false, false, 0.5, 0.5) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("dl_log_prior structure") {
  // With a_dl > 1 the uniform simplex maximizes the Dirichlet term.
  const Index p = 4;
  DirichletLaplaceState s{VectorXd::Zero(p), VectorXd::Ones(p), VectorXd::Constant(p, 0.25), 1.0, 2.0, 1.0};
  const double at_uniform = dl_log_prior(s, false, 0.5, 0.5);
  RngStream rng(6, 0);
  for (int rep = 0; rep < 20; ++rep) {
    VectorXd phi = (0.3 * random_point(p, rng)).array().exp();
    phi /= phi.sum();
    s.phi = phi;
    CHECK(dl_log_prior(s, false, 0.5, 0.5) <= at_uniform + 1e-12);
  }
  // p = 1: phi is the degenerate simplex (1).
  DirichletLaplaceState one{VectorXd::Constant(1, 0.3), VectorXd::Constant(1, 2.0), VectorXd::Ones(1), 0.8, 1.0, 1.0};
  const double expected = log_normal_pdf(0.3, 0.0, 2.0 * 0.64) + log_exponential_pdf(2.0, 0.5) +
                          log_gamma_pdf(0.8, 1.0, 0.5);
  CHECK(dl_log_prior(one, false, 0.5, 0.5) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kappa") {
  CHECK(kappa(1.0, 1.0) == 0.5);
  CHECK(kappa(std::sqrt(3.0), 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(kappa(1e-9, 1e-9) == doctest::Approx(1.0));
  CHECK(kappa(1e200, 1e200) >= 0.0);
}

TEST_CASE("unconstrained prior equals the constrained prior plus Jacobian") {
  RngStream rng(21, 0);
  for (PriorKind prior : {PriorKind::becca, PriorKind::hs, PriorKind::hsplus, PriorKind::dl}) {
    for (ModelKind model : {ModelKind::linear, ModelKind::logistic}) {
      const auto t = prior_target(prior, 3, model);
      for (int rep = 0; rep < 10; ++rep) {
        const VectorXd z = random_point(t.dimension(), rng);
        CAPTURE(to_string(prior));
        CHECK(testing::target_value(t, z) == doctest::Approx(direct_prior(t, z)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("prior gradients match finite differences") {
  RngStream rng(22, 0);
  for (PriorKind prior : {PriorKind::becca, PriorKind::hs, PriorKind::hsplus, PriorKind::dl}) {
    for (ModelKind model : {ModelKind::linear, ModelKind::logistic}) {
      const auto t = prior_target(prior, 4, model);
      double worst = 0.0;
      for (int rep = 0; rep < 50; ++rep) {
        const VectorXd z = random_point(t.dimension(), rng);
        VectorXd grad;
        t.log_density_gradient(z, grad);
        const VectorXd fd = testing::fd_gradient([&](const VectorXd& x) { return testing::target_value(t, x); }, z,
                                                 1e-5);
        worst = std::max(worst, testing::max_rel_error(grad, fd));
      }
      CAPTURE(to_string(prior));
      CHECK(worst < 1e-5);
    }
  }
}

TEST_CASE("beta(u,u) limits") {
  const double tol = 1e-10;
  CHECK(beta_interval_mass(0.01, 0.01, 0.05, 0.95, tol) < 0.05);
  CHECK(beta_interval_mass(1000, 1000, 0.45, 0.55, tol) > 0.99);
  CHECK(beta_interval_mass(1, 1, 0.2, 0.7, tol) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("prior names") {
  CHECK(parse_prior("becca") == PriorKind::becca);
  CHECK(parse_prior("hs+") == PriorKind::hsplus);
  CHECK(to_string(PriorKind::dl) == "dl");
  CHECK_THROWS_AS(parse_prior("lasso"), ConfigError);
}
