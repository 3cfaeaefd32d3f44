#pragma once

#include <string>
#include <vector>

#include "becca/core_stats.hpp"

namespace becca {

/// Value used for points outside the support; the sampler treats it as an
/// infinite energy barrier.
inline constexpr double kRejected = -std::numeric_limits<double>::infinity();

/// A differentiable log density on R^d.
class LogDensityModel {
 public:
  virtual ~LogDensityModel() = default;

  virtual Index dimension() const = 0;

  /// Returns the log density and writes its gradient; returns kRejected
  /// (gradient unspecified) when the value is not finite.
  virtual double log_density_gradient(const VectorXd& z, VectorXd& grad) const = 0;

  /// Names of the quantities returned by `constrain`.
  virtual std::vector<std::string> parameter_names() const = 0;

  /// Quantities recorded per draw.
  virtual VectorXd constrain(const VectorXd& z) const = 0;
};

}  // namespace becca
