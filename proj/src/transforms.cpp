#include "becca/transforms.hpp"

#include <limits>
#include <sstream>

namespace becca {
namespace {

[[noreturn]] void out_of_support(const Block& block, Index i, double value) {
  std::ostringstream msg;
  msg << "to_unconstrained: block '" << block.name << "' index " << i << " value " << value
      << " is outside the open support";
  throw DomainError(msg.str());
}

double stick_offset(Index k, Index size) {
  // Offset so that a zero free vector gives the uniform simplex.
  return -std::log(static_cast<double>(size - k - 1));
}

}  // namespace

Index constrained_size(const Layout& layout) {
  Index n = 0;
  for (const auto& b : layout) n += b.length;
  return n;
}

Index unconstrained_size(const Layout& layout) {
  Index n = 0;
  for (const auto& b : layout) n += b.unconstrained_length();
  return n;
}

double inv_logit_interior(double z) {
  constexpr double below_one = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  const double x = inv_logit(z);
  if (x >= 1.0) return below_one;
  if (x <= 0.0) return std::numeric_limits<double>::denorm_min();
  return x;
}

StickBreaking stick_breaking(const Eigen::Ref<const VectorXd>& free) {
  const Index size = free.size() + 1;
  StickBreaking out;
  out.log_phi.resize(size);
  double log_remaining = 0.0;
  for (Index k = 0; k + 1 < size; ++k) {
    const double w = free(k) + stick_offset(k, size);
    const double lz = log_inv_logit(w);
    const double l1mz = log1m_inv_logit(w);
    out.log_phi(k) = log_remaining + lz;
    out.log_jacobian += lz + l1mz + log_remaining;
    log_remaining += l1mz;
  }
  out.log_phi(size - 1) = log_remaining;
  return out;
}

VectorXd stick_breaking_gradient(const Eigen::Ref<const VectorXd>& free,
                                 const Eigen::Ref<const VectorXd>& dlog_phi, bool with_jacobian) {
  const Index size = free.size() + 1;
  const double jac = with_jacobian ? 1.0 : 0.0;
  VectorXd grad(free.size());
  double d_remaining = dlog_phi(size - 1);
  for (Index k = size - 2; k >= 0; --k) {
    const double w = free(k) + stick_offset(k, size);
    const double z = inv_logit(w);
    const double one_minus_z = inv_logit(-w);
    const double d_lz = dlog_phi(k) + jac;
    const double d_l1mz = jac + d_remaining;
    grad(k) = d_lz * one_minus_z - d_l1mz * z;
    d_remaining = dlog_phi(k) + jac + d_remaining;
  }
  return grad;
}

VectorXd stick_breaking_inverse(const Eigen::Ref<const VectorXd>& phi) {
  const Index size = phi.size();
  VectorXd free(size - 1);
  // Suffix sums keep the leftover stick accurate when the leading entries dominate.
  VectorXd tail(size);
  tail(size - 1) = phi(size - 1);
  for (Index k = size - 2; k >= 0; --k) tail(k) = tail(k + 1) + phi(k);
  for (Index k = 0; k + 1 < size; ++k)
    free(k) = std::log(phi(k)) - std::log(tail(k + 1)) - stick_offset(k, size);
  return free;
}

TransformedVector to_unconstrained(const VectorXd& constrained, const Layout& layout) {
  if (constrained.size() != constrained_size(layout))
    throw DomainError("to_unconstrained: vector length does not match layout");
  TransformedVector out;
  out.layout = layout;
  out.constrained = constrained;
  out.unconstrained.resize(unconstrained_size(layout));
  Index c = 0;
  Index u = 0;
  for (const auto& block : layout) {
    switch (block.kind) {
      case BlockKind::identity:
        for (Index i = 0; i < block.length; ++i) {
          if (!std::isfinite(constrained(c + i))) out_of_support(block, i, constrained(c + i));
          out.unconstrained(u + i) = constrained(c + i);
        }
        break;
      case BlockKind::log:
        for (Index i = 0; i < block.length; ++i) {
          const double x = constrained(c + i);
          if (!(x > 0.0) || !std::isfinite(x)) out_of_support(block, i, x);
          out.unconstrained(u + i) = std::log(x);
        }
        break;
      case BlockKind::logit:
        for (Index i = 0; i < block.length; ++i) {
          const double x = constrained(c + i);
          if (!(x > 0.0 && x < 1.0)) out_of_support(block, i, x);
          out.unconstrained(u + i) = logit(x);
        }
        break;
      case BlockKind::simplex: {
        const auto phi = constrained.segment(c, block.length);
        for (Index i = 0; i < block.length; ++i)
          if (!(phi(i) > 0.0)) out_of_support(block, i, phi(i));
        if (std::abs(phi.sum() - 1.0) > 1e-10) out_of_support(block, block.length - 1, phi.sum());
        out.unconstrained.segment(u, block.length - 1) = stick_breaking_inverse(phi);
        break;
      }
    }
    c += block.length;
    u += block.unconstrained_length();
  }
  out.log_jacobian = to_constrained(out.unconstrained, layout).log_jacobian;
  return out;
}

TransformedVector to_constrained(const VectorXd& unconstrained, const Layout& layout) {
  if (unconstrained.size() != unconstrained_size(layout))
    throw DomainError("to_constrained: vector length does not match layout");
  TransformedVector out;
  out.layout = layout;
  out.unconstrained = unconstrained;
  out.constrained.resize(constrained_size(layout));
  Index c = 0;
  Index u = 0;
  for (const auto& block : layout) {
    switch (block.kind) {
      case BlockKind::identity:
        out.constrained.segment(c, block.length) = unconstrained.segment(u, block.length);
        break;
      case BlockKind::log:
        for (Index i = 0; i < block.length; ++i) {
          const double z = unconstrained(u + i);
          out.constrained(c + i) = std::exp(z);
          out.log_jacobian += z;
        }
        break;
      case BlockKind::logit:
        for (Index i = 0; i < block.length; ++i) {
          const double z = unconstrained(u + i);
          out.constrained(c + i) = inv_logit_interior(z);
          out.log_jacobian += log_inv_logit(z) + log1m_inv_logit(z);
        }
        break;
      case BlockKind::simplex: {
        const auto sb = stick_breaking(unconstrained.segment(u, block.length - 1));
        out.constrained.segment(c, block.length) = sb.log_phi.array().exp().matrix();
        out.log_jacobian += sb.log_jacobian;
        break;
      }
    }
    c += block.length;
    u += block.unconstrained_length();
  }
  return out;
}

VectorXd log_jacobian_gradient(const VectorXd& unconstrained, const Layout& layout) {
  VectorXd grad = VectorXd::Zero(unconstrained.size());
  Index u = 0;
  for (const auto& block : layout) {
    const Index len = block.unconstrained_length();
    switch (block.kind) {
      case BlockKind::identity:
        break;
      case BlockKind::log:
        grad.segment(u, len).setOnes();
        break;
      case BlockKind::logit:
        for (Index i = 0; i < len; ++i) grad(u + i) = 1.0 - 2.0 * inv_logit(unconstrained(u + i));
        break;
      case BlockKind::simplex:
        grad.segment(u, len) = stick_breaking_gradient(unconstrained.segment(u, len),
                                                       VectorXd::Zero(block.length), true);
        break;
    }
    u += len;
  }
  return grad;
}

}  // namespace becca
