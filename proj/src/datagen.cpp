#include "becca/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "becca/csv.hpp"
#include "becca/errors.hpp"

namespace becca {

std::string to_string(CoefficientLaw law) {
  switch (law) {
    case CoefficientLaw::normal_scaled: return "normal_scaled";
    case CoefficientLaw::uniform: return "uniform";
    case CoefficientLaw::fixed: return "fixed";
  }
  return "?";
}

CoefficientLaw parse_coefficient_law(const std::string& name) {
  if (name == "normal_scaled" || name == "normal") return CoefficientLaw::normal_scaled;
  if (name == "uniform") return CoefficientLaw::uniform;
  if (name == "fixed") return CoefficientLaw::fixed;
  throw ConfigError("unknown coefficient law '" + name + "' (expected normal_scaled, uniform or fixed)");
}

void SimSpec::validate() const {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (p < 1) throw ConfigError("p must be at least 1");
  if (q < 0 || q > p) throw ConfigError("q must lie in [0, p]");
  if (covariance.dim != p) throw ConfigError("covariance dimension does not match p");
  try {
    covariance.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("covariance: ") + e.what());
  }
  if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
  if (law == CoefficientLaw::uniform && !(lo < hi)) throw ConfigError("uniform law needs lo < hi");
}

CovarianceSpec default_covariance(ModelKind model, Index p) {
  return model == ModelKind::linear ? CovarianceSpec::equicorrelated(p, 0.75) : CovarianceSpec::autoregressive(p, 0.65);
}

SimSpec default_sim_spec(ModelKind model, Index n, Index p, Index q) {
  SimSpec s;
  s.model = model;
  s.n = n;
  s.p = p;
  s.q = q;
  s.covariance = default_covariance(model, p);
  s.law = model == ModelKind::linear ? CoefficientLaw::normal_scaled : CoefficientLaw::uniform;
  return s;
}

namespace {

VectorXd draw_coefficients(const SimSpec& spec, RngStream& rng) {
  VectorXd beta = VectorXd::Zero(spec.p);
  const double g = spec.g > 0.0 ? spec.g : static_cast<double>(spec.n);
  for (Index j = 0; j < spec.q; ++j) {
    switch (spec.law) {
      case CoefficientLaw::normal_scaled: beta(j) = std::sqrt(g * spec.sigma2) * rng.normal(); break;
      case CoefficientLaw::uniform: beta(j) = rng.uniform(spec.lo, spec.hi); break;
      case CoefficientLaw::fixed: beta(j) = spec.value; break;
    }
  }
  return beta;
}

Dataset generate_with(const SimSpec& spec, RngStream& rng) {
  spec.validate();
  const MatrixXd X = mvn_sample(cholesky(spec.covariance), spec.n, rng);
  VectorXd beta = draw_coefficients(spec, rng);
  VectorXi inclusion = VectorXi::Zero(spec.p);
  inclusion.head(spec.q).setOnes();
  if (spec.permute) {
    std::vector<Index> perm(static_cast<size_t>(spec.p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    VectorXd b2(spec.p);
    VectorXi i2(spec.p);
    for (Index j = 0; j < spec.p; ++j) {
      b2(perm[j]) = beta(j);
      i2(perm[j]) = inclusion(j);
    }
    beta = b2;
    inclusion = i2;
  }
  Dataset d = simulate_response(X, beta, spec.model, spec.sigma2, rng);
  d.true_inclusion = inclusion;
  return d;
}

}  // namespace

Dataset simulate_response(const MatrixXd& X, const VectorXd& beta, ModelKind model, double sigma2, RngStream& rng) {
  if (X.cols() != beta.size()) throw DomainError("simulate_response: X and beta disagree in length");
  Dataset d;
  d.X = X;
  d.y.resize(X.rows());
  const VectorXd eta = X * beta;
  const double sd = std::sqrt(sigma2);
  for (Index i = 0; i < X.rows(); ++i) {
    if (model == ModelKind::linear)
      d.y(i) = eta(i) + sd * rng.normal();
    else
      d.y(i) = rng.bernoulli(inv_logit(eta(i))) ? 1.0 : 0.0;
  }
  d.true_beta = beta;
  d.true_inclusion = (beta.array() != 0.0).cast<int>();
  return d;
}

Dataset gen_linear(const SimSpec& spec, RngStream& rng) {
  if (spec.model != ModelKind::linear) throw ConfigError("gen_linear needs model = linear");
  return generate_with(spec, rng);
}

Dataset gen_logistic(const SimSpec& spec, RngStream& rng) {
  if (spec.model != ModelKind::logistic) throw ConfigError("gen_logistic needs model = logistic");
  return generate_with(spec, rng);
}

Dataset generate(const SimSpec& spec, std::uint64_t stream) {
  RngStream rng(spec.seed, stream);
  return spec.model == ModelKind::linear ? gen_linear(spec, rng) : gen_logistic(spec, rng);
}

Dataset standardize(const Dataset& data, ModelKind model) {
  const Index n = data.n();
  if (n < 2) throw DataError("standardize needs at least two rows");
  Dataset out = data;
  out.x_mean = data.X.colwise().mean().transpose();
  out.x_scale.resize(data.p());
  for (Index j = 0; j < data.p(); ++j) {
    const double ss = (data.X.col(j).array() - out.x_mean(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw DataError("column x" + std::to_string(j + 1) + " is constant and cannot be standardized");
    out.x_scale(j) = sd;
  }
  out.y_mean = model == ModelKind::linear ? data.y.mean() : 0.0;
  return apply_standardization(data, out, model);
}

Dataset apply_standardization(const Dataset& data, const Dataset& reference, ModelKind model) {
  Dataset out = data;
  out.X = (data.X.rowwise() - reference.x_mean.transpose()).array().rowwise() / reference.x_scale.transpose().array();
  if (model == ModelKind::linear) out.y = data.y.array() - reference.y_mean;
  out.x_mean = reference.x_mean;
  out.x_scale = reference.x_scale;
  out.y_mean = model == ModelKind::linear ? reference.y_mean : 0.0;
  out.standardized = true;
  return out;
}

std::string dataset_csv(const Dataset& data) {
  CsvTable t;
  t.header.push_back("y");
  for (Index j = 0; j < data.p(); ++j) t.header.push_back("x" + std::to_string(j + 1));
  for (Index i = 0; i < data.n(); ++i) {
    std::vector<std::string> row;
    row.push_back(format_double(data.y(i)));
    for (Index j = 0; j < data.p(); ++j) row.push_back(format_double(data.X(i, j)));
    t.rows.push_back(std::move(row));
  }
  return write_csv(t);
}

std::string truth_csv(const Dataset& data) {
  CsvTable t;
  t.header = {"j", "true_beta", "true_inclusion"};
  for (Index j = 0; j < data.p(); ++j) {
    t.rows.push_back({std::to_string(j + 1), data.true_beta ? format_double((*data.true_beta)(j)) : "",
                      data.true_inclusion ? std::to_string((*data.true_inclusion)(j)) : ""});
  }
  return write_csv(t);
}

Dataset read_dataset_csv(const std::string& text, const std::string& response, ModelKind model) {
  const CsvTable t = parse_csv(text);
  std::vector<std::string> predictors;
  for (const auto& h : t.header)
    if (h != response) predictors.push_back(h);
  t.column(response);
  Dataset d;
  d.y = numeric_columns(t, {response}).col(0);
  d.X = numeric_columns(t, predictors);
  d.validate(model);
  return d;
}

void read_truth_csv(const std::string& text, Dataset& data) {
  const CsvTable t = parse_csv(text);
  const MatrixXd m = numeric_columns(t, {"true_beta", "true_inclusion"});
  if (m.rows() != data.p()) throw DataError("truth file has " + std::to_string(m.rows()) + " rows, expected " +
                                            std::to_string(data.p()));
  data.true_beta = m.col(0);
  data.true_inclusion = m.col(1).cast<int>();
}

}  // namespace becca
