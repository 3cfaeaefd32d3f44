#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "becca/log_density.hpp"
#include "becca/priors.hpp"

namespace becca {

enum class ModelKind { linear, logistic };
/// `automatic` samples coefficients the data pin down (see
/// `informative_coefficients`) directly and the rest noncentered.
enum class Parameterization { centered, noncentered, automatic };

std::string to_string(ModelKind kind);
ModelKind parse_model(const std::string& name);
std::string to_string(Parameterization param);
Parameterization parse_parameterization(const std::string& name);

struct Dataset {
  VectorXd y;
  MatrixXd X;
  std::optional<VectorXd> true_beta;
  std::optional<VectorXi> true_inclusion;
  bool standardized = false;
  /// Column means and sample standard deviations removed by standardization.
  VectorXd x_mean;
  VectorXd x_scale;
  double y_mean = 0.0;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }

  /// Throws DataError on shape mismatch, non-finite entries, non-binary
  /// logistic responses, or a standardized flag the columns do not honour.
  void validate(ModelKind model) const;
};

/// Full Gaussian log-likelihood, -(n/2) log(2 pi sigma2) - |y - X beta|^2 / (2 sigma2).
double linear_log_likelihood(const VectorXd& y, const MatrixXd& X, const VectorXd& beta, double sigma2);

/// Success probability for one row; stable for |x beta| up to 700.
double logistic_prob(const Eigen::Ref<const VectorXd>& x_row, const Eigen::Ref<const VectorXd>& beta);

/// Bernoulli log-likelihood of binary y; throws DataError on other values.
double logistic_log_likelihood(const VectorXd& y, const MatrixXd& X, const VectorXd& beta);

/// Coefficients whose penalized estimate lies more than `threshold`
/// standard errors from zero, from a unit-ridge fit (linear) or
/// ridge-penalized logistic fit, with an unpenalized intercept when asked.
std::vector<bool> informative_coefficients(const Dataset& data, ModelKind model, bool intercept,
                                           double threshold = 3.0);

struct TargetOptions {
  ModelKind model = ModelKind::linear;
  PriorKind prior = PriorKind::becca;
  Parameterization param = Parameterization::automatic;
  InverseGammaHyper ig;
  /// Dirichlet concentration; <= 0 means 1/p.
  double a_dl = 0.0;
  /// Unpenalized intercept with a flat prior.
  bool intercept = false;
  /// Hold the hyperparameters (unconstrained coordinates) fixed.
  std::optional<VectorXd> fixed_hyper;
  /// Hold log(sigma2) fixed (linear model).
  std::optional<double> fixed_log_sigma2;
  /// Per-coefficient override of `param`: true samples beta_j directly.
  std::optional<std::vector<bool>> centered_mask;
};

/// Joint log posterior on the unconstrained scale with analytic gradient.
///
/// Coordinates are laid out as [coefficients (p)] [intercept] [hyperparameter
/// blocks of the prior] [log sigma2]; bracketed blocks other than the
/// coefficients are absent when not applicable or held fixed. Under the
/// noncentered parameterization the coefficient block holds
/// z_j = beta_j / sd_j.
class PosteriorTarget final : public LogDensityModel {
 public:
  PosteriorTarget(Dataset data, TargetOptions options);

  Index dimension() const override { return dim_; }
  double log_density_gradient(const VectorXd& z, VectorXd& grad) const override;
  std::vector<std::string> parameter_names() const override;
  /// [beta (p)] [intercept] [hyperparameters, constrained] [sigma2].
  VectorXd constrain(const VectorXd& z) const override;

  /// Inverse of `constrain` (for the free coordinates only).
  VectorXd unconstrain(const VectorXd& constrained) const;

  /// Log of the prior standard deviation of every coefficient at z.
  VectorXd log_scales(const VectorXd& z) const;

  const Dataset& data() const { return data_; }
  const TargetOptions& options() const { return options_; }
  const ScaleHierarchy& hierarchy() const { return *hierarchy_; }
  Index p() const { return data_.p(); }
  bool has_sigma2() const { return options_.model == ModelKind::linear; }
  bool samples_sigma2() const { return has_sigma2() && !options_.fixed_log_sigma2; }
  bool samples_hyper() const { return !options_.fixed_hyper; }
  /// Whether coordinate j holds beta_j itself rather than beta_j / sd_j.
  bool is_centered(Index j) const { return centered_(j) != 0.0; }

 private:
  Dataset data_;
  TargetOptions options_;
  std::unique_ptr<ScaleHierarchy> hierarchy_;
  VectorXd centered_;  // 1 where beta_j is sampled directly
  Index intercept_at_ = -1;
  Index hyper_at_ = -1;
  Index sigma_at_ = -1;
  Index dim_ = 0;
};

/// Value and gradient in one call; value is kRejected outside the support.
std::pair<double, VectorXd> log_posterior_and_grad(const PosteriorTarget& target, const VectorXd& z);

}  // namespace becca
