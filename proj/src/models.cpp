#include "becca/models.hpp"

#include <cmath>

#include "becca/errors.hpp"
#include "becca/transforms.hpp"

namespace becca {

std::string to_string(ModelKind kind) { return kind == ModelKind::linear ? "linear" : "logistic"; }

ModelKind parse_model(const std::string& name) {
  if (name == "linear") return ModelKind::linear;
  if (name == "logistic") return ModelKind::logistic;
  throw ConfigError("unknown model '" + name + "' (expected linear or logistic)");
}

std::string to_string(Parameterization param) {
  switch (param) {
    case Parameterization::centered:
      return "centered";
    case Parameterization::noncentered:
      return "noncentered";
    case Parameterization::automatic:
      return "auto";
  }
  return "unknown";
}

Parameterization parse_parameterization(const std::string& name) {
  if (name == "centered") return Parameterization::centered;
  if (name == "noncentered" || name == "non-centered") return Parameterization::noncentered;
  if (name == "auto") return Parameterization::automatic;
  throw ConfigError("unknown parameterization '" + name + "' (expected centered, noncentered or auto)");
}

void Dataset::validate(ModelKind model) const {
  if (y.size() != X.rows()) throw DataError("y has " + std::to_string(y.size()) + " entries but X has " +
                                            std::to_string(X.rows()) + " rows");
  if (!X.allFinite()) throw DataError("X contains non-finite values");
  if (!y.allFinite()) throw DataError("y contains non-finite values");
  if (model == ModelKind::logistic) {
    for (Index i = 0; i < y.size(); ++i)
      if (y(i) != 0.0 && y(i) != 1.0)
        throw DataError("logistic response at row " + std::to_string(i + 1) + " is not 0 or 1");
  }
  if (true_beta && true_beta->size() != p()) throw DataError("true_beta length does not match X");
  if (true_inclusion && true_inclusion->size() != p()) throw DataError("true_inclusion length does not match X");
  if (standardized && n() > 1) {
    for (Index j = 0; j < p(); ++j) {
      const double mean = X.col(j).mean();
      const double sd = std::sqrt((X.col(j).array() - mean).square().sum() / static_cast<double>(n() - 1));
      if (std::abs(mean) >= 1e-8 || std::abs(sd - 1.0) > 1e-8)
        throw DataError("column " + std::to_string(j + 1) + " is flagged standardized but is not");
    }
  }
}

namespace {

void check_dims(const VectorXd& y, const MatrixXd& X, const VectorXd& beta) {
  if (y.size() != X.rows() || beta.size() != X.cols())
    throw DataError("dimension mismatch: y " + std::to_string(y.size()) + ", X " + std::to_string(X.rows()) +
                    "x" + std::to_string(X.cols()) + ", beta " + std::to_string(beta.size()));
}

// sum_i y_i eta_i - log(1 + e^eta_i)
double bernoulli_logit_sum(const VectorXd& y, const VectorXd& eta) {
  double ll = 0.0;
  for (Index i = 0; i < y.size(); ++i) ll += y(i) * eta(i) - softplus(eta(i));
  return ll;
}

}  // namespace

double linear_log_likelihood(const VectorXd& y, const MatrixXd& X, const VectorXd& beta, double sigma2) {
  check_dims(y, X, beta);
  if (!(sigma2 > 0.0)) throw DomainError("linear_log_likelihood: sigma2 must be positive");
  const double rss = (y - X * beta).squaredNorm();
  const double n = static_cast<double>(y.size());
  return -0.5 * n * (2.0 * kHalfLogTwoPi + std::log(sigma2)) - rss / (2.0 * sigma2);
}

double logistic_prob(const Eigen::Ref<const VectorXd>& x_row, const Eigen::Ref<const VectorXd>& beta) {
  if (x_row.size() != beta.size()) throw DataError("logistic_prob: dimension mismatch");
  return inv_logit(x_row.dot(beta));
}

double logistic_log_likelihood(const VectorXd& y, const MatrixXd& X, const VectorXd& beta) {
  check_dims(y, X, beta);
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0) throw DataError("logistic_log_likelihood: y must be 0 or 1");
  if (y.size() == 0) return 0.0;
  return bernoulli_logit_sum(y, X * beta);
}

std::vector<bool> informative_coefficients(const Dataset& data, ModelKind model, bool intercept, double threshold) {
  const Index n = data.n();
  const Index p = data.p();
  const Index k = p + (intercept ? 1 : 0);
  MatrixXd X(n, k);
  X.leftCols(p) = data.X;
  if (intercept) X.col(p).setOnes();
  VectorXd penalty = VectorXd::Ones(k);
  if (intercept) penalty(p) = 0.0;

  VectorXd beta = VectorXd::Zero(k);
  MatrixXd precision;
  double scale2 = 1.0;
  if (model == ModelKind::linear) {
    const MatrixXd gram = X.transpose() * X;
    precision = gram;
    precision.diagonal() += penalty;
    const Eigen::LDLT<MatrixXd> ldlt(precision);
    beta = ldlt.solve(X.transpose() * data.y);
    const double rss = (data.y - X * beta).squaredNorm();
    const double dof = ldlt.solve(gram).trace();
    scale2 = rss / std::max(1.0, static_cast<double>(n) - dof);
  } else {
    for (int it = 0; it < 50; ++it) {
      const VectorXd eta = X * beta;
      VectorXd w(n), resid(n);
      for (Index i = 0; i < n; ++i) {
        const double mu = inv_logit(eta(i));
        w(i) = mu * (1.0 - mu);
        resid(i) = data.y(i) - mu;
      }
      precision = X.transpose() * w.asDiagonal() * X;
      precision.diagonal() += penalty;
      const VectorXd step = precision.ldlt().solve(X.transpose() * resid - penalty.cwiseProduct(beta));
      beta += step;
      if (step.cwiseAbs().maxCoeff() < 1e-8) break;
    }
  }
  const VectorXd var = precision.ldlt().solve(MatrixXd::Identity(k, k)).diagonal() * scale2;
  std::vector<bool> out(static_cast<size_t>(p));
  for (Index j = 0; j < p; ++j) out[static_cast<size_t>(j)] = std::abs(beta(j)) > threshold * std::sqrt(var(j));
  return out;
}

PosteriorTarget::PosteriorTarget(Dataset data, TargetOptions options)
    : data_(std::move(data)), options_(std::move(options)) {
  data_.validate(options_.model);
  const Index p = data_.p();
  const bool sigma_scaled = options_.model == ModelKind::linear;
  hierarchy_ = make_scale_hierarchy(options_.prior, p, sigma_scaled, options_.a_dl,
                                    options_.param != Parameterization::centered);
  if (options_.fixed_hyper && options_.fixed_hyper->size() != hierarchy_->hyper_size())
    throw ConfigError("fixed hyperparameter vector has the wrong length");
  if (options_.ig.a <= 0.0 || options_.ig.b <= 0.0) throw ConfigError("inverse-gamma a and b must be positive");
  centered_ = VectorXd::Constant(p, options_.param == Parameterization::centered ? 1.0 : 0.0);
  if (options_.param == Parameterization::automatic && !options_.centered_mask)
    options_.centered_mask = informative_coefficients(data_, options_.model, options_.intercept);
  if (options_.centered_mask) {
    if (static_cast<Index>(options_.centered_mask->size()) != p)
      throw ConfigError("centered mask has the wrong length");
    for (Index j = 0; j < p; ++j) centered_(j) = (*options_.centered_mask)[static_cast<size_t>(j)] ? 1.0 : 0.0;
  }
  dim_ = p;
  if (options_.intercept) intercept_at_ = dim_++;
  if (samples_hyper()) {
    hyper_at_ = dim_;
    dim_ += hierarchy_->hyper_size();
  }
  if (samples_sigma2()) sigma_at_ = dim_++;
}

double PosteriorTarget::log_density_gradient(const VectorXd& z, VectorXd& grad) const {
  const Index p = data_.p();
  const Index h = hierarchy_->hyper_size();
  grad.setZero(dim_);
  if (z.size() != dim_) throw DomainError("log_density_gradient: expected " + std::to_string(dim_) + " coordinates");

  const VectorXd hyper = samples_hyper() ? VectorXd(z.segment(hyper_at_, h)) : *options_.fixed_hyper;
  double log_sigma2 = 0.0;
  if (has_sigma2()) log_sigma2 = samples_sigma2() ? z(sigma_at_) : *options_.fixed_log_sigma2;

  VectorXd log_scale(p);
  VectorXd grad_hyper = VectorXd::Zero(h);
  double lp = hierarchy_->evaluate(hyper, log_sigma2, log_scale, grad_hyper);
  double dlog_sigma2 = 0.0;

  const auto coef = z.head(p);
  VectorXd beta(p);
  VectorXd dlog_scale(p);
  VectorXd grad_coef(p);
  for (Index j = 0; j < p; ++j) {
    lp -= kHalfLogTwoPi;
    if (centered_(j) == 0.0) {
      beta(j) = coef(j) * std::exp(log_scale(j));
      lp -= 0.5 * coef(j) * coef(j);
      grad_coef(j) = -coef(j);
      dlog_scale(j) = 0.0;
    } else {
      beta(j) = coef(j);
      const double b2 = beta(j) * beta(j) * std::exp(-2.0 * log_scale(j));
      lp -= log_scale(j) + 0.5 * b2;
      grad_coef(j) = -beta(j) * std::exp(-2.0 * log_scale(j));
      dlog_scale(j) = b2 - 1.0;
    }
  }

  const double intercept = options_.intercept ? z(intercept_at_) : 0.0;
  VectorXd eta = data_.X * beta;
  eta.array() += intercept;
  VectorXd d_eta(data_.n());
  if (options_.model == ModelKind::linear) {
    const VectorXd resid = data_.y - eta;
    const double rss = resid.squaredNorm();
    const double n = static_cast<double>(data_.n());
    const double inv_sigma2 = std::exp(-log_sigma2);
    lp += -0.5 * n * (2.0 * kHalfLogTwoPi + log_sigma2) - 0.5 * rss * inv_sigma2;
    d_eta = resid * inv_sigma2;
    dlog_sigma2 += -0.5 * n + 0.5 * rss * inv_sigma2;
    // sigma2 ~ IG(a, b) on the log scale, with Jacobian.
    const double a = options_.ig.a;
    const double b = options_.ig.b;
    lp += a * std::log(b) - log_gamma(a) - a * log_sigma2 - b * inv_sigma2;
    dlog_sigma2 += -a + b * inv_sigma2;
  } else {
    lp += bernoulli_logit_sum(data_.y, eta);
    for (Index i = 0; i < eta.size(); ++i) d_eta(i) = data_.y(i) - inv_logit(eta(i));
  }
  const VectorXd grad_beta = data_.X.transpose() * d_eta;

  for (Index j = 0; j < p; ++j) {
    if (centered_(j) == 0.0) {
      grad_coef(j) += grad_beta(j) * std::exp(log_scale(j));
      dlog_scale(j) = grad_beta(j) * beta(j);
    } else {
      grad_coef(j) += grad_beta(j);
    }
  }
  dlog_sigma2 += hierarchy_->backprop(hyper, dlog_scale, grad_hyper);

  grad.head(p) = grad_coef;
  if (options_.intercept) grad(intercept_at_) = d_eta.sum();
  if (samples_hyper()) grad.segment(hyper_at_, h) = grad_hyper;
  if (samples_sigma2()) grad(sigma_at_) = dlog_sigma2;

  if (!std::isfinite(lp) || !grad.allFinite()) return kRejected;
  return lp;
}

std::vector<std::string> PosteriorTarget::parameter_names() const {
  std::vector<std::string> names;
  const Index p = data_.p();
  for (Index j = 0; j < p; ++j) names.push_back("beta[" + std::to_string(j + 1) + "]");
  if (options_.intercept) names.emplace_back("intercept");
  for (const auto& block : hierarchy_->layout()) {
    if (!block.indexed) {
      names.push_back(block.name);
      continue;
    }
    for (Index j = 0; j < block.length; ++j) names.push_back(block.name + "[" + std::to_string(j + 1) + "]");
  }
  if (has_sigma2()) names.emplace_back("sigma2");
  return names;
}

VectorXd PosteriorTarget::log_scales(const VectorXd& z) const {
  const Index h = hierarchy_->hyper_size();
  const VectorXd hyper = samples_hyper() ? VectorXd(z.segment(hyper_at_, h)) : *options_.fixed_hyper;
  double log_sigma2 = 0.0;
  if (has_sigma2()) log_sigma2 = samples_sigma2() ? z(sigma_at_) : *options_.fixed_log_sigma2;
  VectorXd log_scale(data_.p());
  VectorXd scratch(h);
  hierarchy_->evaluate(hyper, log_sigma2, log_scale, scratch);
  return log_scale;
}

VectorXd PosteriorTarget::constrain(const VectorXd& z) const {
  const Index p = data_.p();
  const Layout& layout = hierarchy_->layout();
  const Index hc = constrained_size(layout);
  VectorXd out(p + (options_.intercept ? 1 : 0) + hc + (has_sigma2() ? 1 : 0));
  Index at = 0;
  const VectorXd scale = log_scales(z).array().exp();
  for (Index j = 0; j < p; ++j) out(j) = centered_(j) == 0.0 ? z(j) * scale(j) : z(j);
  at = p;
  if (options_.intercept) out(at++) = z(intercept_at_);
  const VectorXd hyper =
      samples_hyper() ? VectorXd(z.segment(hyper_at_, hierarchy_->hyper_size())) : *options_.fixed_hyper;
  out.segment(at, hc) = to_constrained(hierarchy_->to_layout(hyper), layout).constrained;
  at += hc;
  if (has_sigma2()) out(at) = std::exp(samples_sigma2() ? z(sigma_at_) : *options_.fixed_log_sigma2);
  return out;
}

VectorXd PosteriorTarget::unconstrain(const VectorXd& constrained) const {
  const Index p = data_.p();
  const Layout& layout = hierarchy_->layout();
  const Index hc = constrained_size(layout);
  const Index expected = p + (options_.intercept ? 1 : 0) + hc + (has_sigma2() ? 1 : 0);
  if (constrained.size() != expected) throw DomainError("unconstrain: expected " + std::to_string(expected) + " values");
  VectorXd z(dim_);
  Index at = p;
  if (options_.intercept) z(intercept_at_) = constrained(at++);
  const VectorXd hyper = hierarchy_->from_layout(to_unconstrained(constrained.segment(at, hc), layout).unconstrained);
  at += hc;
  if (samples_hyper()) z.segment(hyper_at_, hyper.size()) = hyper;
  if (samples_sigma2()) {
    if (!(constrained(at) > 0.0)) throw DomainError("unconstrain: sigma2 must be positive");
    z(sigma_at_) = std::log(constrained(at));
  }
  z.head(p) = constrained.head(p);
  // log_scales reads only the hyperparameter and sigma2 coordinates.
  const VectorXd inv_scale = (-log_scales(z).array()).exp();
  for (Index j = 0; j < p; ++j)
    if (centered_(j) == 0.0) z(j) *= inv_scale(j);
  return z;
}

std::pair<double, VectorXd> log_posterior_and_grad(const PosteriorTarget& target, const VectorXd& z) {
  VectorXd grad;
  const double lp = target.log_density_gradient(z, grad);
  return {lp, std::move(grad)};
}

}  // namespace becca
