#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "becca/errors.hpp"

namespace becca {

/// Integration interval; either end may be infinite.
struct Interval {
  double lo;
  double hi;
};

struct QuadratureOptions {
  double abs_tol = 1e-8;
  /// Converged when error <= max(abs_tol, rel_tol * |estimate|).
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

namespace detail {

struct Gk15Panel {
  double a;
  double b;
  double value;
  double error;
};

// 15-point Kronrod rule with embedded 7-point Gauss rule; QUADPACK error model.
template <typename F>
Gk15Panel gk15(F& f, double a, double b, long& evaluations) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> fv1{};
  std::array<double, 7> fv2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += wgk[j] * (f1 + f2);
    resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  evaluations += 15;
  const double reskh = resk * 0.5;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  if (!std::isfinite(value) || !std::isfinite(err)) {
    std::ostringstream msg;
    msg << "integrate_1d: non-finite integrand on [" << a << ", " << b << "]";
    throw IntegrationError(msg.str(), std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::infinity());
  }
  return {a, b, value, err};
}

template <typename F>
QuadratureResult adaptive_finite(F& f, double a, double b, const QuadratureOptions& opt) {
  QuadratureResult out;
  std::vector<Gk15Panel> panels;
  panels.reserve(64);
  panels.push_back(gk15(f, a, b, out.evaluations));
  auto total = [&]() {
    double v = 0.0;
    double e = 0.0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };
  auto [value, error] = total();
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (static_cast<int>(panels.size()) >= opt.max_intervals) {
      std::ostringstream msg;
      msg << "integrate_1d: no convergence after " << panels.size() << " subintervals (estimate "
          << value << ", error " << error << ")";
      throw IntegrationError(msg.str(), value, error);
    }
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const Gk15Panel& l, const Gk15Panel& r) { return l.error < r.error; });
    const double lo = worst->a;
    const double hi = worst->b;
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) {
      std::ostringstream msg;
      msg << "integrate_1d: subinterval at " << lo << " cannot be split further (estimate " << value
          << ", error " << error << ")";
      throw IntegrationError(msg.str(), value, error);
    }
    *worst = gk15(f, lo, mid, out.evaluations);
    panels.push_back(gk15(f, mid, hi, out.evaluations));
    std::tie(value, error) = total();
  }
  out.value = value;
  out.error = error;
  return out;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over `domain`.
///
/// Half-infinite ranges are mapped onto (0,1) with x = lo + t/(1-t) (or the
/// mirror image); the doubly-infinite case is split at zero. Endpoints are
/// never evaluated, so integrable endpoint singularities are fine.
/// Throws IntegrationError carrying the best estimate when the subdivision
/// budget runs out.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, Interval domain, const QuadratureOptions& opt = {}) {
  const bool lo_inf = std::isinf(domain.lo);
  const bool hi_inf = std::isinf(domain.hi);
  if (domain.lo == domain.hi) return {};
  if (domain.lo > domain.hi) {
    auto r = integrate_adaptive(f, Interval{domain.hi, domain.lo}, opt);
    r.value = -r.value;
    return r;
  }
  if (lo_inf && hi_inf) {
    QuadratureOptions half = opt;
    half.abs_tol = opt.abs_tol / 2;
    auto left = integrate_adaptive(f, Interval{-std::numeric_limits<double>::infinity(), 0.0}, half);
    auto right = integrate_adaptive(f, Interval{0.0, std::numeric_limits<double>::infinity()}, half);
    return {left.value + right.value, left.error + right.error, left.evaluations + right.evaluations};
  }
  if (hi_inf) {
    const double lo = domain.lo;
    auto g = [&](double t) {
      const double s = 1.0 - t;
      if (!(s > std::numeric_limits<double>::epsilon())) return 0.0;
      return f(lo + t / s) / (s * s);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, opt);
  }
  if (lo_inf) {
    const double hi = domain.hi;
    auto g = [&](double t) {
      const double s = 1.0 - t;
      if (!(s > std::numeric_limits<double>::epsilon())) return 0.0;
      return f(hi - t / s) / (s * s);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, opt);
  }
  return detail::adaptive_finite(f, domain.lo, domain.hi, opt);
}

/// Integral of f over `domain` with absolute error at most `tol`.
template <typename F>
double integrate_1d(F&& f, Interval domain, double tol) {
  QuadratureOptions opt;
  opt.abs_tol = tol;
  return integrate_adaptive(std::forward<F>(f), domain, opt).value;
}

}  // namespace becca
