#pragma once

#include <cmath>
#include <functional>

#include "becca/core_stats.hpp"
#include "becca/datagen.hpp"
#include "becca/models.hpp"
#include "becca/nuts.hpp"

namespace becca::testing {

/// Central finite-difference gradient.
inline VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double h) {
  VectorXd g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    VectorXd a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

/// Largest per-coordinate error, relative to max(1, |fd|).
inline double max_rel_error(const VectorXd& analytic, const VectorXd& fd) {
  double worst = 0.0;
  for (Index i = 0; i < fd.size(); ++i)
    worst = std::max(worst, std::abs(analytic(i) - fd(i)) / std::max(1.0, std::abs(fd(i))));
  return worst;
}

inline Dataset small_dataset(ModelKind model, Index n, Index p, std::uint64_t seed) {
  SimSpec spec = default_sim_spec(model, n, p, std::min<Index>(p, 2));
  spec.covariance = CovarianceSpec::identity(p);
  spec.law = CoefficientLaw::fixed;
  spec.value = 1.0;
  spec.seed = seed;
  return generate(spec, 0);
}

inline double target_value(const PosteriorTarget& t, const VectorXd& z) {
  VectorXd g;
  return t.log_density_gradient(z, g);
}

}  // namespace becca::testing

namespace becca::testing {

/// Independent normal target with per-coordinate scales.
class NormalTarget final : public LogDensityModel {
 public:
  explicit NormalTarget(VectorXd scales) : scales_(std::move(scales)) {}
  Index dimension() const override { return scales_.size(); }
  double log_density_gradient(const VectorXd& z, VectorXd& grad) const override {
    const VectorXd w = z.cwiseQuotient(scales_);
    grad = -w.cwiseQuotient(scales_);
    return -0.5 * w.squaredNorm();
  }
  std::vector<std::string> parameter_names() const override {
    std::vector<std::string> names;
    for (Index i = 0; i < scales_.size(); ++i) names.push_back("x[" + std::to_string(i + 1) + "]");
    return names;
  }
  VectorXd constrain(const VectorXd& z) const override { return z; }

 private:
  VectorXd scales_;
};

}  // namespace becca::testing
