#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "becca/errors.hpp"
#include "becca/rng.hpp"

namespace becca {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

namespace detail {
// Overflow and pole errors surface as inf/NaN instead of exceptions; the
// posterior turns those into rejections.
using QuietPolicy = boost::math::policies::policy<
    boost::math::policies::domain_error<boost::math::policies::ignore_error>,
    boost::math::policies::pole_error<boost::math::policies::ignore_error>,
    boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
    boost::math::policies::evaluation_error<boost::math::policies::ignore_error>,
    boost::math::policies::promote_double<false>>;
}  // namespace detail

inline constexpr double kLogTwoOverPi = -0.45158270528945486;  // log(2/pi)
inline constexpr double kHalfLogTwoPi = 0.91893853320467274;   // 0.5 log(2 pi)

template <typename Scalar>
Scalar log_gamma(Scalar x) {
  return boost::math::lgamma(x, detail::QuietPolicy());
}

template <typename Scalar>
Scalar digamma(Scalar x) {
  return boost::math::digamma(x, detail::QuietPolicy());
}

template <typename Scalar>
Scalar log_beta_function(Scalar u, Scalar v) {
  using std::log;
  using std::log1p;
  const Scalar a = u < v ? u : v;
  const Scalar b = u < v ? v : u;
  if (b > Scalar(1e5)) {
    // Stirling difference for log Gamma(b) - log Gamma(a + b).
    const Scalar diff = -(a + b - Scalar(0.5)) * log1p(a / b) - a * log(b) + a +
                        (Scalar(1) / (12 * b) - Scalar(1) / (12 * (a + b)));
    return log_gamma(a) + diff;
  }
  return log_gamma(u) + log_gamma(v) - log_gamma(u + v);
}

/// log(1 + x^2) without overflow for large |x|.
template <typename Scalar>
Scalar log1p_square(Scalar x) {
  using std::abs;
  using std::log;
  using std::log1p;
  const Scalar ax = abs(x);
  if (ax > Scalar(1e8)) return 2 * log(ax) + log1p(1 / (ax * ax));
  return log1p(ax * ax);
}

/// 2 x^2 / (1 + x^2), finite for every finite or infinite x.
template <typename Scalar>
Scalar two_x2_over_1px2(Scalar x) {
  using std::abs;
  if (abs(x) > Scalar(1)) return 2 / (1 + 1 / (x * x));
  return 2 * x * x / (1 + x * x);
}

/// Half-Cauchy C+(0,1) log density, log[2 / (pi (1 + x^2))].
template <typename Scalar>
Scalar log_half_cauchy(Scalar x) {
  if (!(x >= Scalar(0))) throw DomainError("log_half_cauchy: x must be >= 0");
  return Scalar(kLogTwoOverPi) - log1p_square(x);
}

template <typename Scalar>
Scalar log_beta_pdf(Scalar x, Scalar u, Scalar v) {
  using std::log;
  using std::log1p;
  if (!(x > Scalar(0) && x < Scalar(1))) throw DomainError("log_beta_pdf: x must lie in (0,1)");
  if (!(u > Scalar(0) && v > Scalar(0))) throw DomainError("log_beta_pdf: shapes must be positive");
  return (u - 1) * log(x) + (v - 1) * log1p(-x) - log_beta_function(u, v);
}

template <typename Scalar>
Scalar log_inv_gamma_pdf(Scalar x, Scalar a, Scalar b) {
  using std::log;
  if (!(x > Scalar(0))) throw DomainError("log_inv_gamma_pdf: x must be positive");
  if (!(a > Scalar(0) && b > Scalar(0))) throw DomainError("log_inv_gamma_pdf: a, b must be positive");
  return a * log(b) - log_gamma(a) - (a + 1) * log(x) - b / x;
}

template <typename Scalar>
Scalar log_normal_pdf(Scalar x, Scalar mean, Scalar variance) {
  using std::log;
  if (!(variance > Scalar(0))) throw DomainError("log_normal_pdf: variance must be positive");
  const Scalar d = x - mean;
  return -Scalar(kHalfLogTwoPi) - Scalar(0.5) * log(variance) - d * d / (2 * variance);
}

/// Gamma(shape, rate) log density.
template <typename Scalar>
Scalar log_gamma_pdf(Scalar x, Scalar shape, Scalar rate) {
  using std::log;
  if (!(x > Scalar(0))) throw DomainError("log_gamma_pdf: x must be positive");
  if (!(shape > Scalar(0) && rate > Scalar(0))) throw DomainError("log_gamma_pdf: bad parameters");
  return shape * log(rate) - log_gamma(shape) + (shape - 1) * log(x) - rate * x;
}

template <typename Scalar>
Scalar log_exponential_pdf(Scalar x, Scalar rate) {
  using std::log;
  if (!(x >= Scalar(0))) throw DomainError("log_exponential_pdf: x must be >= 0");
  return log(rate) - rate * x;
}

/// Dirichlet(a, ..., a) log density on the simplex.
double log_dirichlet_symmetric_pdf(const Eigen::Ref<const VectorXd>& phi, double a);

/// Logistic sigmoid, accurate in both tails.
template <typename Scalar>
Scalar inv_logit(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return 1 / (1 + exp(-z));
  const Scalar e = exp(z);
  return e / (1 + e);
}

/// log(1 + exp(z)).
template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  if (z > Scalar(0)) return z + log1p(exp(-z));
  return log1p(exp(z));
}

template <typename Scalar>
Scalar log_inv_logit(Scalar z) {
  return -softplus(-z);
}

template <typename Scalar>
Scalar log1m_inv_logit(Scalar z) {
  return -softplus(z);
}

template <typename Scalar>
Scalar logit(Scalar x) {
  using std::log;
  using std::log1p;
  return log(x) - log1p(-x);
}

/// Predictor covariance for simulated designs.
struct CovarianceSpec {
  enum class Kind { identity, equicorrelated, autoregressive, explicit_matrix };

  Kind kind = Kind::identity;
  Index dim = 1;
  double rho = 0.0;
  MatrixXd matrix_value;

  static CovarianceSpec identity(Index dim);
  static CovarianceSpec equicorrelated(Index dim, double rho);
  static CovarianceSpec autoregressive(Index dim, double rho);
  static CovarianceSpec from_matrix(MatrixXd m);

  /// Throws DomainError when the parameters cannot give a PD matrix.
  void validate() const;
  MatrixXd matrix() const;
};

/// Lower-triangular L with L L^T equal to the requested covariance.
MatrixXd cholesky(const CovarianceSpec& spec);
MatrixXd cholesky(const MatrixXd& sigma);

/// n x dim matrix whose rows are independent N(0, L L^T) draws.
MatrixXd mvn_sample(const MatrixXd& lower, Index n, RngStream& rng);

}  // namespace becca
