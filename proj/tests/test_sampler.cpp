#include <doctest.h>

#include "becca/diagnostics.hpp"
#include "test_util.hpp"

using namespace becca;

namespace {

NutsConfig quick_config(int warmup, int draws, int chains, std::uint64_t seed) {
  NutsConfig c;
  c.warmup = warmup;
  c.draws = draws;
  c.chains = chains;
  c.seed = seed;
  return c;
}

bool same_draws(const DrawMatrix& a, const DrawMatrix& b) {
  if (a.num_chains() != b.num_chains()) return false;
  for (Index c = 0; c < a.num_chains(); ++c) {
    if (a.chains[c].values != b.chains[c].values) return false;
    for (size_t i = 0; i < a.chains[c].stats.size(); ++i)
      if (a.chains[c].stats[i].energy != b.chains[c].stats[i].energy) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("leapfrog reversibility and eps = 0") {
  const testing::NormalTarget target(VectorXd::LinSpaced(4, 0.5, 3.0));
  const VectorXd inv_mass = VectorXd::LinSpaced(4, 0.7, 1.9);
  RngStream rng(1, 0);
  for (int rep = 0; rep < 20; ++rep) {
    PhasePoint p;
    p.z = VectorXd::NullaryExpr(4, [&] { return rng.normal(); });
    p.r = VectorXd::NullaryExpr(4, [&] { return rng.normal(); });
    p.lp = target.log_density_gradient(p.z, p.grad);
    const PhasePoint start = p;
    for (int s = 0; s < 10; ++s) leapfrog(p, 0.13, target, inv_mass);
    p.r = -p.r;
    for (int s = 0; s < 10; ++s) leapfrog(p, 0.13, target, inv_mass);
    CHECK((p.z - start.z).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p.r + start.r).cwiseAbs().maxCoeff() < 1e-10);

    PhasePoint q = start;
    leapfrog(q, 0.0, target, inv_mass);
    CHECK(q.z == start.z);
    CHECK(q.r == start.r);
  }
}

TEST_CASE("leapfrog conserves energy on a 1-D normal") {
  const testing::NormalTarget target(VectorXd::Ones(1));
  const VectorXd inv_mass = VectorXd::Ones(1);
  PhasePoint p;
  p.z = VectorXd::Constant(1, 1.0);
  p.r = VectorXd::Constant(1, 0.5);
  p.lp = target.log_density_gradient(p.z, p.grad);
  const double h0 = hamiltonian(p, inv_mass);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    leapfrog(p, 0.1, target, inv_mass);
    worst = std::max(worst, std::abs(hamiltonian(p, inv_mass) - h0));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("5-D standard normal") {
  const testing::NormalTarget target(VectorXd::Ones(5));
  NutsConfig cfg = quick_config(2000, 1000, 4, 123);
  const DrawMatrix dm = run_chains(target, cfg);
  REQUIRE(dm.num_chains() == 4);
  double accept = 0.0;
  long count = 0;
  for (const auto& ch : dm.chains)
    for (const auto& s : ch.stats) {
      accept += s.accept_stat;
      ++count;
    }
  CHECK(std::abs(accept / count - 0.8) < 0.07);
  for (Index k = 0; k < 5; ++k) {
    const MatrixXd col = dm.column(k);
    const double ess = ess_bulk(col).value;
    const double mean = col.mean();
    const MatrixXd sq = col.array().square();
    const double var = sq.mean() - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(ess));
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / ess_bulk(sq).value));
    CHECK(split_rhat(col).value < 1.01);
  }
  CHECK(dm.depth_limit_hits() == 0);
  CHECK(dm.divergences() == 0);
}

TEST_CASE("determinism across runs and thread counts") {
  const testing::NormalTarget target(VectorXd::LinSpaced(3, 1.0, 5.0));
  NutsConfig cfg = quick_config(150, 100, 4, 77);
  cfg.threads = 1;
  const DrawMatrix a = run_chains(target, cfg);
  const DrawMatrix b = run_chains(target, cfg);
  cfg.threads = 4;
  const DrawMatrix c = run_chains(target, cfg);
  CHECK(same_draws(a, b));
  CHECK(same_draws(a, c));

  cfg.chains = 1;
  const DrawMatrix single = nuts_sample(target, cfg);
  const DrawMatrix one = run_chains(target, cfg);
  CHECK(same_draws(single, one));
  CHECK(single.chains[0].values == a.chains[0].values);
}

TEST_CASE("doubling the depth limit changes nothing when it is never hit") {
  const testing::NormalTarget target(VectorXd::Ones(3));
  NutsConfig cfg = quick_config(200, 200, 2, 5);
  const DrawMatrix a = run_chains(target, cfg);
  REQUIRE(a.depth_limit_hits() == 0);
  cfg.max_tree_depth = 20;
  CHECK(same_draws(a, run_chains(target, cfg)));
}

TEST_CASE("conjugate linear posterior") {
  const Dataset d = testing::small_dataset(ModelKind::linear, 5, 3, 11);
  VectorXd gamma(3);
  gamma << 0.4, 0.7, 0.9;
  const double g = 1.5, sigma2 = 0.8;
  VectorXd hyper(6);
  hyper << gamma.unaryExpr([](double x) { return logit(x); }), std::log(g), 0.0, 0.0;
  TargetOptions o;
  o.param = Parameterization::centered;
  o.fixed_hyper = hyper;
  o.fixed_log_sigma2 = std::log(sigma2);
  PosteriorTarget t(d, o);

  const VectorXd prior_prec = (g * sigma2 * gamma.array().square()).inverse();
  const MatrixXd precision = d.X.transpose() * d.X / sigma2 + MatrixXd(prior_prec.asDiagonal());
  const MatrixXd cov = precision.inverse();
  const VectorXd mean = cov * d.X.transpose() * d.y / sigma2;

  const DrawMatrix dm = run_chains(t, quick_config(1000, 2000, 4, 9));
  for (Index j = 0; j < 3; ++j) {
    const MatrixXd col = dm.column(j);
    const double ess = ess_bulk(col).value;
    CHECK(std::abs(col.mean() - mean(j)) < 3.0 * std::sqrt(cov(j, j) / ess));
    const MatrixXd centered = col.array() - mean(j);
    const MatrixXd sq = centered.array().square();
    const double var_se = std::sqrt(2.0 / ess) * cov(j, j);
    CHECK(std::abs(sq.mean() - cov(j, j)) < 3.0 * var_se);
  }
}

TEST_CASE("stored draws respect their constraints") {
  const Dataset d = testing::small_dataset(ModelKind::linear, 30, 4, 3);
  for (PriorKind prior : {PriorKind::becca, PriorKind::hs, PriorKind::dl}) {
    TargetOptions o;
    o.prior = prior;
    PosteriorTarget t(d, o);
    const DrawMatrix dm = run_chains(t, quick_config(150, 100, 2, 4));
    CHECK_FALSE(dm.pooled().hasNaN());
    CHECK(dm.names == t.parameter_names());
    for (Index k = 4; k < static_cast<Index>(dm.names.size()); ++k) {
      const MatrixXd col = dm.column(k);
      CHECK(col.minCoeff() > 0.0);
      if (dm.names[k].rfind("gamma", 0) == 0 || dm.names[k].rfind("phi", 0) == 0) CHECK(col.maxCoeff() < 1.0);
    }
  }
}

TEST_CASE("initialization failure names the chain") {
  class Nowhere final : public LogDensityModel {
   public:
    Index dimension() const override { return 2; }
    double log_density_gradient(const VectorXd&, VectorXd& grad) const override {
      grad.setZero(2);
      return kRejected;
    }
    std::vector<std::string> parameter_names() const override { return {"a", "b"}; }
    VectorXd constrain(const VectorXd& z) const override { return z; }
  } nowhere;
  try {
    run_chains(nowhere, quick_config(100, 10, 2, 1));
    FAIL("expected a sampler error");
  } catch (const SamplerError& e) {
    CHECK(std::string(e.what()).find("chain") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  NutsConfig c;
  c.warmup = 50;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.warmup = 100;
  c.target_accept = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.target_accept = 0.8;
  CHECK_NOTHROW(c.validate());
}
