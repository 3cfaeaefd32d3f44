#include "becca/priors.hpp"

#include <algorithm>
#include <limits>

#include <boost/math/tools/roots.hpp>

namespace becca {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log N(x; 0, exp(log_var)) that stays NaN-free when the variance under- or overflows.
double log_normal_logvar(double x, double log_var) {
  if (x == 0.0) return -kHalfLogTwoPi - 0.5 * log_var;
  const double quad = 0.5 * std::exp(2.0 * std::log(std::abs(x)) - log_var);
  if (!std::isfinite(quad)) return kNegInf;
  return -kHalfLogTwoPi - 0.5 * log_var - quad;
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

void require_length(Index got, Index want, const char* what) {
  if (got != want) throw DomainError(std::string(what) + " has the wrong length");
}

double sigma2_term(bool include_sigma2, double sigma2, double a, double b) {
  return include_sigma2 ? log_inv_gamma_pdf(sigma2, a, b) : 0.0;
}

// (1 - x^2) / (1 + x^2): d/dlog(x) of [log C+(x) + log x].
double half_cauchy_log_grad(double x) { return 1.0 - two_x2_over_1px2(x); }

double log_half_cauchy_unchecked(double x) { return kLogTwoOverPi - log1p_square(x); }

// logit(gamma) as a function of the sampler coordinate s, for shapes u, v.
struct InclusionMap {
  double t;       // logit(gamma)
  double dt_ds;
  double dt_du;
  double dt_dv;
  double log_dt_ds;
  double d_log_dt_ds_ds;
  double d_log_dt_ds_du;
  double d_log_dt_ds_dv;
};

InclusionMap inclusion_map(double s, double u, double v) {
  const double sp_m = softplus(-s);
  const double sp_p = softplus(s);
  const double w_m = inv_logit(-s);
  const double w_p = inv_logit(s);
  InclusionMap m{};
  m.t = -sp_m / u + sp_p / v;
  m.dt_ds = w_m / u + w_p / v;
  m.dt_du = sp_m / (u * u);
  m.dt_dv = -sp_p / (v * v);
  const double a = log_inv_logit(-s) - std::log(u);
  const double b = log_inv_logit(s) - std::log(v);
  const double hi = std::max(a, b);
  m.log_dt_ds = hi + std::log1p(std::exp(std::min(a, b) - hi));
  m.d_log_dt_ds_ds = w_m * w_p * (1.0 / v - 1.0 / u) / m.dt_ds;
  m.d_log_dt_ds_du = -w_m / (u * u * m.dt_ds);
  m.d_log_dt_ds_dv = -w_p / (v * v * m.dt_ds);
  return m;
}

double inclusion_map_inverse(double t, double u, double v) {
  const double t0 = inclusion_map(0.0, u, v).t;
  const double reach = std::abs(t - t0) * std::max(u, v) + 1.0;
  auto f = [&](double s) {
    const InclusionMap m = inclusion_map(s, u, v);
    return std::make_pair(m.t - t, m.dt_ds);
  };
  const double guess = t < 0.0 ? u * t : v * t;
  return boost::math::tools::newton_raphson_iterate(f, std::clamp(guess, -reach, reach), -reach, reach, 50);
}

class BeccaScales final : public ScaleHierarchy {
 public:
  BeccaScales(Index p, bool sigma_scaled, bool scaled_inclusion)
      : ScaleHierarchy(PriorKind::becca),
        p_(p),
        sigma_scaled_(sigma_scaled),
        scaled_(scaled_inclusion),
        layout_{{"gamma", BlockKind::logit, p}, {"g", BlockKind::log, 1, false}, {"u", BlockKind::log, 1, false},
                {"v", BlockKind::log, 1, false}} {}

  const Layout& layout() const override { return layout_; }
  bool sigma_scaled() const override { return sigma_scaled_; }

  VectorXd to_layout(const VectorXd& hyper) const override {
    if (!scaled_) return hyper;
    VectorXd out = hyper;
    const double u = std::exp(hyper(p_ + 1));
    const double v = std::exp(hyper(p_ + 2));
    for (Index j = 0; j < p_; ++j) out(j) = inclusion_map(hyper(j), u, v).t;
    return out;
  }

  VectorXd from_layout(const VectorXd& coords) const override {
    if (!scaled_) return coords;
    VectorXd out = coords;
    const double u = std::exp(coords(p_ + 1));
    const double v = std::exp(coords(p_ + 2));
    for (Index j = 0; j < p_; ++j) out(j) = inclusion_map_inverse(coords(j), u, v);
    return out;
  }

  double layout_log_jacobian(const VectorXd& hyper) const override {
    if (!scaled_) return 0.0;
    const double u = std::exp(hyper(p_ + 1));
    const double v = std::exp(hyper(p_ + 2));
    double total = 0.0;
    for (Index j = 0; j < p_; ++j) total += inclusion_map(hyper(j), u, v).log_dt_ds;
    return total;
  }

  double evaluate(const Eigen::Ref<const VectorXd>& hyper, double log_sigma2,
                  Eigen::Ref<VectorXd> log_scale, Eigen::Ref<VectorXd> grad) const override {
    const auto a = hyper.head(p_);
    const double log_g = hyper(p_);
    const double log_u = hyper(p_ + 1);
    const double log_v = hyper(p_ + 2);
    const double g = std::exp(log_g);
    const double u = std::exp(log_u);
    const double v = std::exp(log_v);
    const double log_b = log_beta_function(u, v);
    const double psi_uv = digamma(u + v);
    const double psi_u = digamma(u);
    const double psi_v = digamma(v);

    const double global = 0.5 * log_g + (sigma_scaled_ ? 0.5 * log_sigma2 : 0.0);
    double lp = 0.0;
    double du = 0.0;
    double dv = 0.0;
    for (Index j = 0; j < p_; ++j) {
      const InclusionMap m = scaled_ ? inclusion_map(a(j), u, v) : InclusionMap{a(j), 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
      const double lg = log_inv_logit(m.t);
      const double l1mg = log1m_inv_logit(m.t);
      // Beta(u, v) density plus the logit Jacobian log(gamma (1 - gamma)).
      lp += u * lg + v * l1mg;
      const double dt = u * inv_logit(-m.t) - v * inv_logit(m.t);
      du += lg;
      dv += l1mg;
      grad(j) = dt;
      if (scaled_) {
        lp += m.log_dt_ds;
        grad(j) = dt * m.dt_ds + m.d_log_dt_ds_ds;
        du += dt * m.dt_du + m.d_log_dt_ds_du;
        dv += dt * m.dt_dv + m.d_log_dt_ds_dv;
      }
      log_scale(j) = global + lg;
    }
    lp -= static_cast<double>(p_) * log_b;
    lp += log_half_cauchy_unchecked(g) + log_g;
    lp += log_half_cauchy_unchecked(u) + log_u;
    lp += log_half_cauchy_unchecked(v) + log_v;

    const double pd = static_cast<double>(p_);
    grad(p_) = half_cauchy_log_grad(g);
    grad(p_ + 1) = u * (du - pd * (psi_u - psi_uv)) + half_cauchy_log_grad(u);
    grad(p_ + 2) = v * (dv - pd * (psi_v - psi_uv)) + half_cauchy_log_grad(v);
    return lp;
  }

  double backprop(const Eigen::Ref<const VectorXd>& hyper, const Eigen::Ref<const VectorXd>& dls,
                  Eigen::Ref<VectorXd> grad) const override {
    if (scaled_) {
      const double u = std::exp(hyper(p_ + 1));
      const double v = std::exp(hyper(p_ + 2));
      for (Index j = 0; j < p_; ++j) {
        const InclusionMap m = inclusion_map(hyper(j), u, v);
        const double d = dls(j) * inv_logit(-m.t);
        grad(j) += d * m.dt_ds;
        grad(p_ + 1) += d * m.dt_du * u;
        grad(p_ + 2) += d * m.dt_dv * v;
      }
    } else {
      for (Index j = 0; j < p_; ++j) grad(j) += dls(j) * inv_logit(-hyper(j));
    }
    const double total = dls.sum();
    grad(p_) += 0.5 * total;
    return sigma_scaled_ ? 0.5 * total : 0.0;
  }

 private:
  Index p_;
  bool sigma_scaled_;
  bool scaled_;
  Layout layout_;
};

class HorseshoeScales final : public ScaleHierarchy {
 public:
  HorseshoeScales(Index p, bool plus)
      : ScaleHierarchy(plus ? PriorKind::hsplus : PriorKind::hs), p_(p), plus_(plus) {
    layout_ = {{"lambda", BlockKind::log, p}, {"tau", BlockKind::log, 1, false}};
    if (plus_) layout_.push_back({"eta", BlockKind::log, p});
  }

  const Layout& layout() const override { return layout_; }
  bool sigma_scaled() const override { return false; }

  double evaluate(const Eigen::Ref<const VectorXd>& hyper, double, Eigen::Ref<VectorXd> log_scale,
                  Eigen::Ref<VectorXd> grad) const override {
    const double log_tau = hyper(p_);
    double lp = log_half_cauchy_unchecked(std::exp(log_tau)) + log_tau;
    grad(p_) = half_cauchy_log_grad(std::exp(log_tau));
    for (Index j = 0; j < p_; ++j) {
      const double ll = hyper(j);
      const double lambda = std::exp(ll);
      lp += log_half_cauchy_unchecked(lambda) + ll;
      grad(j) = half_cauchy_log_grad(lambda);
      log_scale(j) = ll + log_tau;
    }
    if (plus_) {
      for (Index j = 0; j < p_; ++j) {
        const double le = hyper(p_ + 1 + j);
        const double eta = std::exp(le);
        lp += log_half_cauchy_unchecked(eta) + le;
        grad(p_ + 1 + j) = half_cauchy_log_grad(eta);
        log_scale(j) += le;
      }
    }
    return lp;
  }

  double backprop(const Eigen::Ref<const VectorXd>&, const Eigen::Ref<const VectorXd>& dls,
                  Eigen::Ref<VectorXd> grad) const override {
    grad.head(p_) += dls;
    grad(p_) += dls.sum();
    if (plus_) grad.segment(p_ + 1, p_) += dls;
    return 0.0;
  }

 private:
  Index p_;
  bool plus_;
  Layout layout_;
};

class DirichletLaplaceScales final : public ScaleHierarchy {
 public:
  DirichletLaplaceScales(Index p, double a_dl)
      : ScaleHierarchy(PriorKind::dl),
        p_(p),
        a_(a_dl),
        layout_{{"psi", BlockKind::log, p}, {"phi", BlockKind::simplex, p}, {"tau", BlockKind::log, 1, false}} {}

  const Layout& layout() const override { return layout_; }
  bool sigma_scaled() const override { return false; }

  double evaluate(const Eigen::Ref<const VectorXd>& hyper, double, Eigen::Ref<VectorXd> log_scale,
                  Eigen::Ref<VectorXd> grad) const override {
    const auto free = hyper.segment(p_, p_ - 1);
    const double log_tau = hyper(2 * p_ - 1);
    const double tau = std::exp(log_tau);
    const double pd = static_cast<double>(p_);
    const StickBreaking sb = stick_breaking(free);

    double lp = 0.0;
    for (Index j = 0; j < p_; ++j) {
      const double lpsi = hyper(j);
      const double psi = std::exp(lpsi);
      // Exp(rate 1/2) on psi plus log Jacobian.
      lp += std::log(0.5) - 0.5 * psi + lpsi;
      grad(j) = 1.0 - 0.5 * psi;
      log_scale(j) = 0.5 * lpsi + sb.log_phi(j) + log_tau;
    }
    if (p_ > 1) {
      lp += log_gamma(pd * a_) - pd * log_gamma(a_) + (a_ - 1.0) * sb.log_phi.sum() + sb.log_jacobian;
      grad.segment(p_, p_ - 1) =
          stick_breaking_gradient(free, VectorXd::Constant(p_, a_ - 1.0), true);
    }
    // Gamma(p a, rate 1/2) on tau plus log Jacobian.
    const double shape = pd * a_;
    lp += shape * std::log(0.5) - log_gamma(shape) + shape * log_tau - 0.5 * tau;
    grad(2 * p_ - 1) = shape - 0.5 * tau;
    return lp;
  }

  double backprop(const Eigen::Ref<const VectorXd>& hyper, const Eigen::Ref<const VectorXd>& dls,
                  Eigen::Ref<VectorXd> grad) const override {
    grad.head(p_) += 0.5 * dls;
    if (p_ > 1) grad.segment(p_, p_ - 1) += stick_breaking_gradient(hyper.segment(p_, p_ - 1), dls, false);
    grad(2 * p_ - 1) += dls.sum();
    return 0.0;
  }

 private:
  Index p_;
  double a_;
  Layout layout_;
};

}  // namespace

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::becca:
      return "becca";
    case PriorKind::hs:
      return "hs";
    case PriorKind::hsplus:
      return "hsplus";
    case PriorKind::dl:
      return "dl";
  }
  return "unknown";
}

PriorKind parse_prior(const std::string& name) {
  if (name == "becca") return PriorKind::becca;
  if (name == "hs") return PriorKind::hs;
  if (name == "hsplus" || name == "hs+") return PriorKind::hsplus;
  if (name == "dl") return PriorKind::dl;
  throw ConfigError("unknown prior '" + name + "' (expected becca, hs, hsplus or dl)");
}

double becca_log_prior(const BeccaState& s, bool include_sigma2, double a, double b) {
  const Index p = s.beta.size();
  require_length(s.gamma.size(), p, "gamma");
  require_positive(s.g, "g");
  require_positive(s.u, "u");
  require_positive(s.v, "v");
  if (include_sigma2) require_positive(s.sigma2, "sigma2");
  const double log_global = std::log(s.g) + (include_sigma2 ? std::log(s.sigma2) : 0.0);
  double lp = 0.0;
  for (Index j = 0; j < p; ++j) {
    const double gamma = s.gamma(j);
    if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    lp += log_normal_logvar(s.beta(j), log_global + 2.0 * std::log(gamma));
    if (gamma == 0.0) continue;  // Beta term is finite; the normal term already decided.
    lp += log_beta_pdf(gamma, s.u, s.v);
  }
  lp += log_half_cauchy(s.g) + log_half_cauchy(s.u) + log_half_cauchy(s.v);
  lp += sigma2_term(include_sigma2, s.sigma2, a, b);
  return std::isnan(lp) ? kNegInf : lp;
}

double hs_log_prior(const HorseshoeState& s, bool plus, bool include_sigma2, double a, double b) {
  const Index p = s.beta.size();
  require_length(s.lambda.size(), p, "lambda");
  require_positive(s.tau, "tau");
  if (plus) require_length(s.eta.size(), p, "eta");
  double lp = log_half_cauchy(s.tau);
  for (Index j = 0; j < p; ++j) {
    require_positive(s.lambda(j), "lambda");
    double log_sd = std::log(s.lambda(j)) + std::log(s.tau);
    lp += log_half_cauchy(s.lambda(j));
    if (plus) {
      require_positive(s.eta(j), "eta");
      log_sd += std::log(s.eta(j));
      lp += log_half_cauchy(s.eta(j));
    }
    lp += log_normal_logvar(s.beta(j), 2.0 * log_sd);
  }
  lp += sigma2_term(include_sigma2, s.sigma2, a, b);
  return std::isnan(lp) ? kNegInf : lp;
}

double dl_log_prior(const DirichletLaplaceState& s, bool include_sigma2, double a, double b) {
  const Index p = s.beta.size();
  require_length(s.psi.size(), p, "psi");
  require_length(s.phi.size(), p, "phi");
  require_positive(s.tau, "tau");
  require_positive(s.a_dl, "a_dl");
  const double pd = static_cast<double>(p);
  double lp = log_dirichlet_symmetric_pdf(s.phi, s.a_dl);
  lp += log_gamma_pdf(s.tau, pd * s.a_dl, 0.5);
  for (Index j = 0; j < p; ++j) {
    lp += log_exponential_pdf(s.psi(j), 0.5);
    require_positive(s.psi(j), "psi");
    const double log_var = std::log(s.psi(j)) + 2.0 * std::log(s.phi(j)) + 2.0 * std::log(s.tau);
    lp += log_normal_logvar(s.beta(j), log_var);
  }
  lp += sigma2_term(include_sigma2, s.sigma2, a, b);
  return std::isnan(lp) ? kNegInf : lp;
}

double kappa(double lambda, double tau) {
  const double s = lambda * tau;
  return 1.0 / (1.0 + s * s);
}

std::unique_ptr<ScaleHierarchy> make_scale_hierarchy(PriorKind kind, Index p, bool sigma_scaled,
                                                     double a_dl, bool scaled_inclusion) {
  if (p < 1) throw ConfigError("prior needs at least one coefficient");
  switch (kind) {
    case PriorKind::becca:
      return std::make_unique<BeccaScales>(p, sigma_scaled, scaled_inclusion);
    case PriorKind::hs:
      return std::make_unique<HorseshoeScales>(p, false);
    case PriorKind::hsplus:
      return std::make_unique<HorseshoeScales>(p, true);
    case PriorKind::dl:
      return std::make_unique<DirichletLaplaceScales>(p, a_dl > 0.0 ? a_dl : 1.0 / static_cast<double>(p));
  }
  throw ConfigError("unknown prior");
}

}  // namespace becca
