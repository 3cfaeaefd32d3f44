#pragma once

#include <string>
#include <vector>

#include "becca/core_stats.hpp"
#include "becca/nuts.hpp"

namespace becca {

/// A diagnostic value plus whether it came from the degenerate-input convention.
struct DiagnosticValue {
  double value = 0.0;
  bool degenerate = false;
};

/// Split R-hat. `chains` is draws x chains; every chain is cut in half.
/// Constant input gives 1.0 flagged degenerate.
DiagnosticValue split_rhat(const MatrixXd& chains);

/// Bulk effective sample size of rank-normalized split chains with Geyer's
/// initial monotone sequence truncation; never exceeds the draw count.
/// Constant input gives 0 flagged degenerate.
DiagnosticValue ess_bulk(const MatrixXd& chains);

/// Linear interpolation between order statistics.
double quantile(VectorXd values, double prob);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  double rhat = 1.0;
  double ess_bulk = 0.0;
  bool degenerate = false;
};

struct DiagnosticsReport {
  std::vector<ParameterSummary> parameters;
  long divergences = 0;
  long depth_limit_hits = 0;
  long total_draws = 0;
  std::vector<std::string> warnings;

  double max_rhat(const std::string& prefix = "") const;
  double min_ess(const std::string& prefix = "") const;
  /// Share of matching parameters with R-hat at most `bound` (degenerate ones count as converged).
  double rhat_share(const std::string& prefix, double bound) const;
  /// Key-value text, one parameter per record.
  std::string to_text() const;
};

DiagnosticsReport diagnose(const DrawMatrix& draws);

/// Long-format CSV (chain, iteration, parameter, value). Throws
/// std::out_of_range listing available names on an unknown parameter.
std::string trace_csv(const DrawMatrix& draws, const std::vector<std::string>& params);
void export_trace(const DrawMatrix& draws, const std::vector<std::string>& params, const std::string& path);

}  // namespace becca
