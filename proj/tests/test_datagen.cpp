#include <doctest.h>

#include "becca/csv.hpp"
#include "test_util.hpp"

using namespace becca;

TEST_CASE("default linear setting has ten leading actives") {
  const SimSpec spec = default_sim_spec(ModelKind::linear, 100, 50, 10);
  CHECK(spec.covariance.kind == CovarianceSpec::Kind::equicorrelated);
  CHECK(spec.covariance.rho == 0.75);
  const Dataset d = generate(spec, 0);
  REQUIRE(d.true_beta);
  REQUIRE(d.true_inclusion);
  CHECK(d.X.rows() == 100);
  CHECK(d.X.cols() == 50);
  int nonzero = 0;
  for (Index j = 0; j < 50; ++j) {
    if ((*d.true_beta)(j) != 0.0) {
      ++nonzero;
      CHECK(j < 10);
    }
    CHECK((*d.true_inclusion)(j) == (j < 10 ? 1 : 0));
  }
  CHECK(nonzero == 10);
}

TEST_CASE("normal_scaled law has variance g sigma2 = n") {
  SimSpec spec = default_sim_spec(ModelKind::linear, 100, 400, 400);
  spec.covariance = CovarianceSpec::identity(400);
  const Dataset d = generate(spec, 0);
  const double var = d.true_beta->squaredNorm() / 400.0;
  CHECK(var == doctest::Approx(100.0).epsilon(0.2));
}

TEST_CASE("pure noise when q = 0") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimSpec spec = default_sim_spec(ModelKind::linear, 200, 5, 0);
    spec.seed = seed;
    const Dataset d = generate(spec, 0);
    const VectorXd yc = d.y.array() - d.y.mean();
    for (Index j = 0; j < 5; ++j) {
      const VectorXd xc = d.X.col(j).array() - d.X.col(j).mean();
      CHECK(std::abs(yc.dot(xc) / (yc.norm() * xc.norm())) < 0.3);
    }
  }
}

TEST_CASE("fixed zero law gives y ~ N(0, sigma2)") {
  SimSpec spec = default_sim_spec(ModelKind::linear, 4000, 3, 3);
  spec.law = CoefficientLaw::fixed;
  spec.value = 0.0;
  spec.sigma2 = 2.0;
  const Dataset d = generate(spec, 0);
  CHECK(d.true_beta->isZero());
  CHECK(std::abs(d.y.mean()) < 3 * std::sqrt(2.0 / 4000));
  CHECK((d.y.array() - d.y.mean()).square().mean() == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("logistic generator") {
  const SimSpec spec = default_sim_spec(ModelKind::logistic, 300, 20, 5);
  CHECK(spec.covariance.kind == CovarianceSpec::Kind::autoregressive);
  CHECK(spec.covariance.rho == 0.65);
  CHECK(spec.law == CoefficientLaw::uniform);
  const Dataset d = generate(spec, 0);
  CHECK(d.true_beta->head(5).minCoeff() >= 2.0);
  CHECK(d.true_beta->head(5).maxCoeff() <= 7.5);
  CHECK(d.true_beta->tail(15).isZero());
  for (Index i = 0; i < d.n(); ++i) CHECK((d.y(i) == 0.0 || d.y(i) == 1.0));

  SimSpec null_spec = default_sim_spec(ModelKind::logistic, 2000, 4, 0);
  const Dataset n = generate(null_spec, 0);
  CHECK(std::abs(n.y.mean() - 0.5) < 3 * std::sqrt(0.25 / 2000));
}

TEST_CASE("sample covariance matches the design") {
  for (const auto& cov : {CovarianceSpec::equicorrelated(5, 0.75), CovarianceSpec::autoregressive(5, 0.65)}) {
    SimSpec spec = default_sim_spec(ModelKind::linear, 100000, 5, 1);
    spec.covariance = cov;
    const Dataset d = generate(spec, 0);
    const MatrixXd c = d.X.rowwise() - d.X.colwise().mean();
    const MatrixXd s = c.transpose() * c / (d.n() - 1);
    CHECK((s - cov.matrix()).cwiseAbs().maxCoeff() < 0.02);
  }
}

TEST_CASE("determinism and permutation") {
  SimSpec spec = default_sim_spec(ModelKind::linear, 30, 8, 3);
  spec.seed = 99;
  const Dataset a = generate(spec, 2), b = generate(spec, 2), c = generate(spec, 3);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  CHECK(a.X != c.X);
  spec.permute = true;
  const Dataset p = generate(spec, 0);
  CHECK(p.true_inclusion->sum() == 3);
  for (Index j = 0; j < 8; ++j) CHECK(((*p.true_beta)(j) != 0.0) == ((*p.true_inclusion)(j) == 1));
}

TEST_CASE("spec validation") {
  SimSpec spec = default_sim_spec(ModelKind::linear, 30, 8, 9);
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.q = 3;
  spec.covariance = CovarianceSpec::identity(7);
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("standardize") {
  Dataset d;
  d.X.resize(2, 1);
  d.X << 0, 2;
  d.y = VectorXd::Constant(2, 3.0);
  d.y(1) = 5.0;
  const Dataset s = standardize(d, ModelKind::linear);
  CHECK(s.X(0, 0) == doctest::Approx(-0.70710678).epsilon(1e-8));
  CHECK(s.X(1, 0) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(s.x_scale(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.y.sum() == doctest::Approx(0.0));
  CHECK(s.standardized);

  const Dataset big = generate(default_sim_spec(ModelKind::linear, 50, 6, 2), 0);
  const Dataset once = standardize(big, ModelKind::linear);
  CHECK_NOTHROW(once.validate(ModelKind::linear));
  const Dataset twice = standardize(once, ModelKind::linear);
  CHECK((twice.X - once.X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.y - once.y).cwiseAbs().maxCoeff() < 1e-12);

  Dataset constant = big;
  constant.X.col(3).setConstant(1.0);
  try {
    standardize(constant, ModelKind::linear);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("x4") != std::string::npos);
  }
}

TEST_CASE("csv round trip") {
  const Dataset d = generate(default_sim_spec(ModelKind::logistic, 20, 4, 2), 0);
  Dataset back = read_dataset_csv(dataset_csv(d), "y", ModelKind::logistic);
  read_truth_csv(truth_csv(d), back);
  CHECK(back.X == d.X);
  CHECK(back.y == d.y);
  CHECK(*back.true_beta == *d.true_beta);
  CHECK(*back.true_inclusion == *d.true_inclusion);
  CHECK_THROWS_AS(read_dataset_csv("y,x1\n1,2\n3,oops\n", "y", ModelKind::linear), DataError);
  CHECK_THROWS_AS(read_dataset_csv("y,x1\n1,2\n3,4\n", "resp", ModelKind::linear), DataError);
  CHECK_THROWS_AS(read_dataset_csv("y,x1\n1,2\n3,4\n", "y", ModelKind::logistic), DataError);
}
