#pragma once

#include <string>
#include <vector>

#include "becca/core_stats.hpp"

namespace becca {

enum class BlockKind { identity, log, logit, simplex };

/// One named run of coordinates sharing a transform. `length` counts
/// constrained coordinates; a simplex block has length-1 free coordinates.
struct Block {
  std::string name;
  BlockKind kind;
  Index length;
  bool indexed = true;  ///< named name[1..length] rather than name

  Index unconstrained_length() const { return kind == BlockKind::simplex ? length - 1 : length; }
};

using Layout = std::vector<Block>;

Index constrained_size(const Layout& layout);
Index unconstrained_size(const Layout& layout);

/// A parameter vector in both coordinate systems. `log_jacobian` is
/// log |d constrained / d unconstrained|, the term added to a log density
/// that is expressed on the constrained scale.
struct TransformedVector {
  VectorXd constrained;
  VectorXd unconstrained;
  double log_jacobian = 0.0;
  Layout layout;
};

/// Throws DomainError naming the block and index of the first coordinate
/// outside the strict interior of its support.
TransformedVector to_unconstrained(const VectorXd& constrained, const Layout& layout);
TransformedVector to_constrained(const VectorXd& unconstrained, const Layout& layout);

/// Gradient of `log_jacobian` with respect to the unconstrained vector.
VectorXd log_jacobian_gradient(const VectorXd& unconstrained, const Layout& layout);

/// Logistic map clamped to the open interval, so |z| up to 700 never hits 0 or 1.
double inv_logit_interior(double z);

/// Stick-breaking simplex in log space.
///
/// Maps K-1 free coordinates to log(phi) for phi on the K-simplex; a zero
/// vector maps to the uniform simplex. All work is done on log(phi) so
/// entries far below machine epsilon stay representable.
struct StickBreaking {
  VectorXd log_phi;
  double log_jacobian = 0.0;
};

StickBreaking stick_breaking(const Eigen::Ref<const VectorXd>& free);

/// Reverse-mode pass: given dL/dlog(phi), returns dL/dfree. When
/// `with_jacobian` is set the log-Jacobian's gradient is added as well.
VectorXd stick_breaking_gradient(const Eigen::Ref<const VectorXd>& free,
                                 const Eigen::Ref<const VectorXd>& dlog_phi, bool with_jacobian);

/// Inverse of stick_breaking; phi must be strictly positive and sum to one.
VectorXd stick_breaking_inverse(const Eigen::Ref<const VectorXd>& phi);

}  // namespace becca
