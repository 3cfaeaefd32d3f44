#include "becca/marginals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace becca {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

double log_hc(double x) { return kLogTwoOverPi - log1p_square(x); }

// Integrates f over (0, inf) after the substitution x = scale * y, which
// puts the bulk of f near y = 1 (t = 1/2 after the rational map).
template <typename F>
double integrate_scaled_half_line(F&& f, double scale, const QuadratureOptions& opt) {
  auto g = [&](double y) { return f(scale * y); };
  QuadratureOptions scaled = opt;
  scaled.abs_tol = opt.abs_tol / scale;
  return scale * integrate_adaptive(g, Interval{0.0, kInf}, scaled).value;
}

// Density of log(gamma) when log(gamma) = ell and log(1 - gamma) = l1m,
// integrated over (u, v). Every term is kept in log space. `inner_abs` is
// the absolute error allowed in the result as a whole; the inner
// integrals get a share of it weighted like a half-Cauchy in u.
double log_space_gamma_density(double ell, double l1m, const QuadratureOptions& outer,
                               const QuadratureOptions& inner_base, double inner_abs) {
  const double u_scale = 1.0 / (1.0 + std::abs(ell));
  auto over_u = [&](double u) {
    const double lhc_u = log_hc(u);
    QuadratureOptions inner = inner_base;
    inner.abs_tol = inner_abs * std::exp(log_hc(u / u_scale)) / u_scale;
    // The v integrand decays like (1 - gamma)^v for small v and peaks where
    // the Beta mean matches gamma, v ~ u (1 - gamma) / gamma. For tiny u the
    // Beta factor is flat in v and the mass stays near v ~ 1.
    const double v_floor = 1.0 / (1.0 + std::abs(l1m));
    const double v_scale = std::clamp(u * std::exp(l1m - ell), v_floor, std::max(v_floor, 10000.0 * std::max(1.0, u)));
    auto over_v = [&](double v) {
      if (u > 1e150 || v > 1e150) return 0.0;
      const double lp = lhc_u + log_hc(v) + u * ell + (v - 1.0) * l1m - log_beta_function(u, v);
      return std::exp(lp);
    };
    return integrate_scaled_half_line(over_v, v_scale, inner);
  };
  return integrate_scaled_half_line(over_u, u_scale, outer);
}

// ---- Chebyshev table of h(ell) = ell^2 q(ell) on dyadic panels of |ell|. ----

constexpr int kPanelNodes = 14;
constexpr int kPanels = 58;  // |ell| up to ln2 * 2^58 ~ 2e17
constexpr double kTableRelTol = 1e-10;

struct ChebyshevPanel {
  double lo = 0.0;  // in |ell|
  double hi = 0.0;
  std::array<double, kPanelNodes> values{};
};

double node(int j) { return std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * kPanelNodes)); }

class GammaMarginalTable {
 public:
  double h(double abs_ell) {
    const int k = static_cast<int>(std::floor(std::log2(abs_ell / kLn2)));
    if (k < 0) return h_panel(0, abs_ell);
    if (k >= kPanels) return 2.0 / std::numbers::pi;
    return h_panel(k, abs_ell);
  }

 private:
  double h_panel(int k, double abs_ell) {
    std::call_once(built_[k], [&] { build(k); });
    const auto& panel = panels_[k];
    const double x = (2.0 * abs_ell - panel.lo - panel.hi) / (panel.hi - panel.lo);
    // Barycentric interpolation on first-kind Chebyshev nodes.
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < kPanelNodes; ++j) {
      const double diff = x - node(j);
      const double w = ((j % 2) ? -1.0 : 1.0) * std::sin((2.0 * j + 1.0) * std::numbers::pi / (2.0 * kPanelNodes));
      if (diff == 0.0) return panel.values[j];
      num += w / diff * panel.values[j];
      den += w / diff;
    }
    return num / den;
  }

  void build(int k) {
    auto& panel = panels_[k];
    panel.lo = kLn2 * std::ldexp(1.0, k);
    panel.hi = 2.0 * panel.lo;
    for (int j = 0; j < kPanelNodes; ++j) {
      const double abs_ell = 0.5 * (panel.lo + panel.hi) + 0.5 * (panel.hi - panel.lo) * node(j);
      panel.values[j] = abs_ell * abs_ell * log_gamma_marginal_density(-abs_ell, kTableRelTol);
    }
  }

  std::array<ChebyshevPanel, kPanels> panels_{};
  std::array<std::once_flag, kPanels> built_{};
};

GammaMarginalTable& gamma_table() {
  static GammaMarginalTable table;
  return table;
}

// k(x) = integral over g of N(x; 0, g) C+(g): a normal with half-Cauchy variance.
double normal_halfcauchy_variance(double x, double rel_tol) {
  // Only variances g ~ x^2 matter far out, where C+(g) ~ (2/pi) / g^2.
  if (std::abs(x) > 1e8) return 2.0 / std::numbers::pi / (x * x * std::abs(x));
  const double x2 = x * x;
  auto f = [&](double g) {
    if (g == 0.0) return 0.0;
    return std::exp(-kHalfLogTwoPi - 0.5 * std::log(g) - 0.5 * x2 / g + log_hc(g));
  };
  QuadratureOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = rel_tol;
  return integrate_scaled_half_line(f, 1.0 + x2, opt);
}

}  // namespace

double log_gamma_marginal_density(double ell, double rel_tol) {
  if (!(ell < 0.0)) throw DomainError("log_gamma_marginal_density: ell must be negative");
  const double l1m = std::log1p(-std::exp(ell));
  QuadratureOptions outer;
  outer.abs_tol = 0.0;
  outer.rel_tol = rel_tol;
  QuadratureOptions inner;
  inner.abs_tol = 0.0;
  inner.rel_tol = rel_tol * 0.1;
  // q(ell) is of order 0.3 / (1 + ell^2).
  const double scale = 0.3 / (1.0 + ell * ell);
  outer.abs_tol = rel_tol * scale * 1e-2;
  return log_space_gamma_density(ell, l1m, outer, inner, rel_tol * scale * 0.1);
}

double log_gamma_marginal_density_table(double ell) {
  if (!(ell <= -kLn2 * (1.0 - 1e-12))) throw DomainError("log_gamma_marginal_density_table: ell must be <= -log 2");
  const double a = -ell;
  return gamma_table().h(a) / (a * a);
}

double becca_marginal_gamma_density(double gamma, double tol) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("becca_marginal_gamma_density: gamma must lie in (0,1)");
  const double ell = std::log(gamma);
  const double l1m = std::log1p(-gamma);
  QuadratureOptions outer;
  outer.abs_tol = tol * gamma;
  QuadratureOptions inner;
  inner.abs_tol = 0.0;
  inner.rel_tol = std::min(1e-3, tol) * 0.1;
  // Work with the density of log(gamma) and divide by gamma at the end.
  return log_space_gamma_density(ell, l1m, outer, inner, outer.abs_tol * 0.1) / gamma;
}

double becca_logit_gamma_density(double t) {
  // density of t = q(ell) * (1 - gamma) with gamma = sigmoid(-|t|) < 1/2.
  const double a = -std::abs(t);
  const double ell = log_inv_logit(a);
  return log_gamma_marginal_density_table(std::min(ell, -kLn2)) * inv_logit(-a);
}

double becca_marginal_gamma_mass(double tol) {
  QuadratureOptions opt;
  opt.abs_tol = tol / 2.0;
  auto q = [&](double ell) { return log_gamma_marginal_density(ell, tol * 1e-2); };
  return 2.0 * integrate_adaptive(q, Interval{-kInf, -kLn2}, opt).value;
}

double becca_log_abs_beta_density(double w, double tol) {
  if (w > 300.0) return 0.0;  // decays like e^{-2w}
  const double rel = std::min(tol, 1e-4);
  QuadratureOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = rel;

  // gamma < 1/2: with ell = w - s the integrand separates into q(w - s)
  // times e^s k(e^s), whose shape does not depend on beta.
  auto lower_half = [&](double s) {
    if (s > 300.0) return 0.0;  // e^s k(e^s) ~ e^{-2s}
    const double x = std::exp(s);
    return log_gamma_marginal_density_table(w - s) * x * normal_halfcauchy_variance(x, rel * 0.1);
  };
  const double s_lo = std::max(w + kLn2, -50.0);
  double lower = 0.0;
  if (s_lo < 0.0) lower += integrate_adaptive(lower_half, Interval{s_lo, 0.0}, opt).value;
  lower += integrate_adaptive(lower_half, Interval{std::max(s_lo, 0.0), kInf}, opt).value;

  // gamma > 1/2: integrate over m = log(1 - gamma).
  auto upper_half = [&](double m) {
    const double gamma = -std::expm1(m);
    const double x = std::exp(w) / gamma;
    return log_gamma_marginal_density_table(m) * x * normal_halfcauchy_variance(x, rel * 0.1);
  };
  const double upper = integrate_adaptive(upper_half, Interval{-kInf, -kLn2}, opt).value;
  return 2.0 * (lower + upper);
}

double becca_marginal_beta_density(double beta, double tol) {
  if (beta == 0.0) return kInf;
  const double ab = std::abs(beta);
  return becca_log_abs_beta_density(std::log(ab), tol) / (2.0 * ab);
}

double becca_marginal_beta_mass(double tol) {
  auto f = [&](double w) { return becca_log_abs_beta_density(w, tol * 1e-2); };
  return integrate_1d(f, Interval{-kInf, kInf}, tol);
}

double log_product_half_cauchy_density(double r) {
  const double ar = std::abs(r);
  if (ar < 1e-8) return 2.0 / (std::numbers::pi * std::numbers::pi);
  if (ar > 700.0) return 4.0 * ar * std::exp(-ar) / (std::numbers::pi * std::numbers::pi);
  return 2.0 * ar / (std::numbers::pi * std::numbers::pi * std::sinh(ar));
}

namespace {

// Integral over r of N(beta; 0, e^{2r}) f(r), split around r = log|beta|.
template <typename F>
double scale_mixture(double beta, F&& f, double tol) {
  if (beta == 0.0) return kInf;
  const double w = std::log(std::abs(beta));
  auto integrand = [&](double r) {
    const double z = std::abs(beta) * std::exp(-r);
    return std::exp(-kHalfLogTwoPi - r - 0.5 * z * z) * f(r);
  };
  QuadratureOptions opt;
  opt.abs_tol = 0.0;
  opt.rel_tol = tol;
  return integrate_adaptive(integrand, Interval{-kInf, w}, opt).value +
         integrate_adaptive(integrand, Interval{w, kInf}, opt).value;
}

}  // namespace

double hs_marginal_beta_density(double beta, double tol) {
  return scale_mixture(beta, log_product_half_cauchy_density, std::min(tol, 1e-4));
}

double hsplus_marginal_beta_density(double beta, double tol) {
  const double rel = std::min(tol, 1e-4);
  // log(lambda eta tau) = log(lambda tau) + log(eta): convolve with sech(a)/pi.
  auto triple = [&](double r) {
    auto conv = [&](double a) {
      return log_product_half_cauchy_density(r - a) / (std::numbers::pi * std::cosh(a));
    };
    QuadratureOptions opt;
    // f3 peaks near 0.2; tails below this floor do not move the result.
    opt.abs_tol = rel * 1e-4;
    opt.rel_tol = rel * 0.1;
    return integrate_adaptive(conv, Interval{-kInf, r}, opt).value +
           integrate_adaptive(conv, Interval{r, kInf}, opt).value;
  };
  return scale_mixture(beta, triple, rel);
}

double beta_interval_mass(double u, double v, double lo, double hi, double tol) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw DomainError("beta_interval_mass: need 0 <= lo < hi <= 1");
  const double log_b = log_beta_function(u, v);
  auto f = [&](double x) { return std::exp((u - 1.0) * std::log(x) + (v - 1.0) * std::log1p(-x) - log_b); };
  return integrate_1d(f, Interval{lo, hi}, tol);
}

}  // namespace becca
