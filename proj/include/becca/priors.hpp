#pragma once

#include <memory>
#include <string>
#include <vector>

#include "becca/core_stats.hpp"
#include "becca/transforms.hpp"

namespace becca {

enum class PriorKind { becca, hs, hsplus, dl };

std::string to_string(PriorKind kind);
/// Accepts becca, hs, hsplus (or hs+), dl. Throws ConfigError otherwise.
PriorKind parse_prior(const std::string& name);

/// Inverse-gamma hyperparameters for the error variance.
struct InverseGammaHyper {
  double a = 0.5;
  double b = 0.5;
};

/// Full latent state of the Beta Cauchy-Cauchy hierarchy.
struct BeccaState {
  VectorXd beta;
  VectorXd gamma;  ///< inclusion probabilities in (0,1)
  double g = 1.0;  ///< global variance scale
  double u = 1.0;
  double v = 1.0;
  double sigma2 = 1.0;
};

struct HorseshoeState {
  VectorXd beta;
  VectorXd lambda;
  double tau = 1.0;
  VectorXd eta;  ///< horseshoe+ local scales; empty for the plain horseshoe
  double sigma2 = 1.0;
};

struct DirichletLaplaceState {
  VectorXd beta;
  VectorXd psi;
  VectorXd phi;  ///< on the simplex
  double tau = 1.0;
  double a_dl = 0.5;
  double sigma2 = 1.0;
};

/// log p(beta, gamma, g, u, v [, sigma2]).
///
/// beta_j ~ N(0, g sigma2 gamma_j^2), gamma_j ~ Beta(u, v), g, u, v ~ C+(0,1),
/// sigma2 ~ IG(a, b). Without sigma2 (logistic model) the coefficient
/// variance is g gamma_j^2. Returns -inf, never NaN, when a coefficient
/// variance underflows with a nonzero coefficient.
double becca_log_prior(const BeccaState& state, bool include_sigma2, double a, double b);

/// Horseshoe: beta_j ~ N(0, lambda_j^2 tau^2), lambda_j, tau ~ C+(0,1).
/// With `plus`, the local scale is lambda_j eta_j and eta_j ~ C+(0,1).
double hs_log_prior(const HorseshoeState& state, bool plus, bool include_sigma2, double a, double b);

/// Dirichlet-Laplace: beta_j ~ N(0, psi_j phi_j^2 tau^2), psi_j ~ Exp(1/2),
/// phi ~ Dir(a_dl), tau ~ Gamma(p a_dl, 1/2).
double dl_log_prior(const DirichletLaplaceState& state, bool include_sigma2, double a, double b);

/// Horseshoe shrinkage weight 1 / (1 + lambda^2 tau^2).
double kappa(double lambda, double tau);

/// Unconstrained form of a prior's scale hierarchy.
///
/// Every prior here gives coefficient j a normal prior with standard
/// deviation exp(log_scale_j); the hierarchy owns the hyperparameters that
/// produce those log scales. The posterior target evaluates the hierarchy,
/// forms the coefficient term itself, and hands dL/dlog_scale back through
/// `backprop`.
class ScaleHierarchy {
 public:
  virtual ~ScaleHierarchy() = default;

  /// Hyperparameter blocks in unconstrained order (excludes beta and sigma2).
  virtual const Layout& layout() const = 0;
  Index hyper_size() const { return unconstrained_size(layout()); }

  /// Fills `log_scale` (length p), returns the hyperprior log density plus
  /// transform log-Jacobians, and writes its gradient into `grad_hyper`.
  /// `log_sigma2` is ignored when the hierarchy is not sigma-scaled.
  virtual double evaluate(const Eigen::Ref<const VectorXd>& hyper, double log_sigma2,
                          Eigen::Ref<VectorXd> log_scale, Eigen::Ref<VectorXd> grad_hyper) const = 0;

  /// Adds the chain-rule contribution of dL/dlog_scale into `grad_hyper`;
  /// returns the contribution to dL/dlog_sigma2.
  virtual double backprop(const Eigen::Ref<const VectorXd>& hyper,
                          const Eigen::Ref<const VectorXd>& dlog_scale,
                          Eigen::Ref<VectorXd> grad_hyper) const = 0;

  /// Whether the coefficient scale carries a factor sigma.
  virtual bool sigma_scaled() const = 0;

  /// Maps sampler coordinates to the coordinates `layout()` describes.
  /// Identity unless the hierarchy reparameterizes a block.
  virtual VectorXd to_layout(const VectorXd& hyper) const { return hyper; }
  virtual VectorXd from_layout(const VectorXd& coords) const { return coords; }
  /// log |d to_layout / d hyper|.
  virtual double layout_log_jacobian(const VectorXd&) const { return 0.0; }

  /// Selection criterion per coordinate (gamma_j or 1 - kappa_j), by name lookup.
  PriorKind kind() const { return kind_; }

 protected:
  explicit ScaleHierarchy(PriorKind kind) : kind_(kind) {}

 private:
  PriorKind kind_;
};

/// Builds the hierarchy for `kind` over p coefficients. `sigma_scaled`
/// applies to BECCA only (true for the linear model). `a_dl` <= 0 means 1/p.
///
/// With `scaled_inclusion`, BECCA samples s_j in place of logit(gamma_j),
/// where logit(gamma_j) = -softplus(-s_j) / u + softplus(s_j) / v. The Beta
/// tails of logit(gamma) widen like 1/u and 1/v; in s they do not.
std::unique_ptr<ScaleHierarchy> make_scale_hierarchy(PriorKind kind, Index p, bool sigma_scaled,
                                                     double a_dl = 0.0, bool scaled_inclusion = false);

}  // namespace becca
