#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "becca/models.hpp"
#include "becca/rng.hpp"

namespace becca {

enum class CoefficientLaw {
  normal_scaled,  ///< beta_j ~ N(0, g sigma2) on the active set, g defaulting to n
  uniform,        ///< beta_j ~ Unif(lo, hi) on the active set
  fixed           ///< beta_j = value on the active set
};

std::string to_string(CoefficientLaw law);
CoefficientLaw parse_coefficient_law(const std::string& name);

struct SimSpec {
  Index n = 100;
  Index p = 50;
  Index q = 10;  ///< active predictors, placed first unless `permute`
  ModelKind model = ModelKind::linear;
  CovarianceSpec covariance = CovarianceSpec::equicorrelated(50, 0.75);
  CoefficientLaw law = CoefficientLaw::normal_scaled;
  double g = 0.0;  ///< <= 0 means g = n
  double sigma2 = 1.0;
  double lo = 2.0;
  double hi = 7.5;
  double value = 2.5;
  bool permute = false;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Equicorrelated 0.75 for the linear design, AR(1) 0.65 for the logistic one.
CovarianceSpec default_covariance(ModelKind model, Index p);
/// A SimSpec with the default design for the model.
SimSpec default_sim_spec(ModelKind model, Index n, Index p, Index q);

/// Draws X ~ MVN(0, Sigma), the coefficients, then y, in that order from `rng`.
Dataset gen_linear(const SimSpec& spec, RngStream& rng);
Dataset gen_logistic(const SimSpec& spec, RngStream& rng);
/// Dispatches on spec.model using RngStream(spec.seed, stream).
Dataset generate(const SimSpec& spec, std::uint64_t stream = 0);

/// Response for given X and beta (linear with variance sigma2, or Bernoulli).
Dataset simulate_response(const MatrixXd& X, const VectorXd& beta, ModelKind model, double sigma2, RngStream& rng);

/// Centers and scales X columns (sample sd), centers y for the linear model.
/// Throws DataError naming a constant column.
Dataset standardize(const Dataset& data, ModelKind model);
/// Applies another dataset's centering and scaling (e.g. training statistics
/// to a test split).
Dataset apply_standardization(const Dataset& data, const Dataset& reference, ModelKind model);

/// CSV with header y,x1..xp.
std::string dataset_csv(const Dataset& data);
/// Sidecar CSV: j,true_beta,true_inclusion.
std::string truth_csv(const Dataset& data);
/// Reads a data CSV. Every column other than `response` is a predictor.
Dataset read_dataset_csv(const std::string& text, const std::string& response, ModelKind model);
void read_truth_csv(const std::string& text, Dataset& data);

}  // namespace becca
