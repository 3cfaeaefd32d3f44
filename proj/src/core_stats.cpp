#include "becca/core_stats.hpp"

#include <sstream>

namespace becca {

double log_dirichlet_symmetric_pdf(const Eigen::Ref<const VectorXd>& phi, double a) {
  const double k = static_cast<double>(phi.size());
  if (!(a > 0)) throw DomainError("log_dirichlet_symmetric_pdf: concentration must be positive");
  if ((phi.array() <= 0).any() || std::abs(phi.sum() - 1.0) > 1e-10)
    throw DomainError("log_dirichlet_symmetric_pdf: phi must lie on the open simplex");
  if (phi.size() == 1) return 0.0;
  return log_gamma(k * a) - k * log_gamma(a) + (a - 1) * phi.array().log().sum();
}

CovarianceSpec CovarianceSpec::identity(Index dim) {
  CovarianceSpec s;
  s.kind = Kind::identity;
  s.dim = dim;
  return s;
}

CovarianceSpec CovarianceSpec::equicorrelated(Index dim, double rho) {
  CovarianceSpec s;
  s.kind = Kind::equicorrelated;
  s.dim = dim;
  s.rho = rho;
  return s;
}

CovarianceSpec CovarianceSpec::autoregressive(Index dim, double rho) {
  CovarianceSpec s;
  s.kind = Kind::autoregressive;
  s.dim = dim;
  s.rho = rho;
  return s;
}

CovarianceSpec CovarianceSpec::from_matrix(MatrixXd m) {
  CovarianceSpec s;
  s.kind = Kind::explicit_matrix;
  s.dim = m.rows();
  s.matrix_value = std::move(m);
  return s;
}

void CovarianceSpec::validate() const {
  if (dim < 1) throw DomainError("covariance: dim must be positive");
  switch (kind) {
    case Kind::identity:
      break;
    case Kind::equicorrelated: {
      const double lower = dim > 1 ? -1.0 / static_cast<double>(dim - 1) : -1.0;
      if (!(rho > lower && rho < 1.0)) {
        std::ostringstream msg;
        msg << "covariance: equicorrelated rho=" << rho << " outside (" << lower << ", 1) for dim "
            << dim;
        throw DomainError(msg.str());
      }
      break;
    }
    case Kind::autoregressive:
      if (!(std::abs(rho) < 1.0)) throw DomainError("covariance: autoregressive requires |rho| < 1");
      break;
    case Kind::explicit_matrix:
      if (matrix_value.rows() != matrix_value.cols() || matrix_value.rows() != dim)
        throw DomainError("covariance: explicit matrix must be square with the declared dim");
      if (!matrix_value.isApprox(matrix_value.transpose(), 1e-12))
        throw DomainError("covariance: explicit matrix must be symmetric");
      break;
  }
}

MatrixXd CovarianceSpec::matrix() const {
  validate();
  switch (kind) {
    case Kind::identity:
      return MatrixXd::Identity(dim, dim);
    case Kind::equicorrelated: {
      MatrixXd m = MatrixXd::Constant(dim, dim, rho);
      m.diagonal().setOnes();
      return m;
    }
    case Kind::autoregressive: {
      MatrixXd m(dim, dim);
      for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) m(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
      return m;
    }
    case Kind::explicit_matrix:
      return matrix_value;
  }
  return {};
}

MatrixXd cholesky(const MatrixXd& sigma) {
  const Index n = sigma.rows();
  if (sigma.cols() != n) throw DomainError("cholesky: matrix must be square");
  MatrixXd lower = MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double diag = sigma(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(diag > 0.0)) {
      std::ostringstream msg;
      msg << "cholesky: matrix is not positive definite (pivot " << j << " = " << diag << ")";
      throw FactorizationError(msg.str(), static_cast<long>(j));
    }
    const double ljj = std::sqrt(diag);
    lower(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      lower(i, j) = (sigma(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / ljj;
    }
  }
  return lower;
}

MatrixXd cholesky(const CovarianceSpec& spec) {
  spec.validate();
  return cholesky(spec.matrix());
}

MatrixXd mvn_sample(const MatrixXd& lower, Index n, RngStream& rng) {
  const Index dim = lower.rows();
  MatrixXd z(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) z(i, j) = rng.normal();
  return z * lower.transpose();
}

}  // namespace becca
