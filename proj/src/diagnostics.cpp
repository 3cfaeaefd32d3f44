#include "becca/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <complex>
#include <unsupported/Eigen/FFT>

#include "becca/csv.hpp"

namespace becca {
namespace {

void require_shape(const MatrixXd& chains) {
  if (chains.cols() < 1 || chains.rows() < 4) throw DomainError("diagnostics need at least one chain of length 4");
}

// Halves of every chain as columns (an odd middle draw is dropped).
MatrixXd split_chains(const MatrixXd& chains) {
  const Index half = chains.rows() / 2;
  MatrixXd out(half, 2 * chains.cols());
  for (Index c = 0; c < chains.cols(); ++c) {
    out.col(2 * c) = chains.col(c).head(half);
    out.col(2 * c + 1) = chains.col(c).tail(half);
  }
  return out;
}

bool all_constant(const MatrixXd& m) { return (m.array() == m(0, 0)).all(); }

double rhat_of(const MatrixXd& split) {
  const double n = static_cast<double>(split.rows());
  const Index m = split.cols();
  const VectorXd means = split.colwise().mean();
  double w = 0.0;
  for (Index c = 0; c < m; ++c) w += (split.col(c).array() - means(c)).square().sum() / (n - 1.0);
  w /= static_cast<double>(m);
  const double grand = means.mean();
  const double b = m > 1 ? n * (means.array() - grand).square().sum() / static_cast<double>(m - 1) : 0.0;
  return std::sqrt(((n - 1.0) / n * w + b / n) / w);
}

// Biased autocovariance of one sequence at every lag, via a zero-padded FFT.
VectorXd autocovariance(const VectorXd& x) {
  const Index n = x.size();
  Index len = 1;
  while (len < 2 * n) len *= 2;
  std::vector<double> padded(static_cast<size_t>(len), 0.0);
  const double mean = x.mean();
  for (Index i = 0; i < n; ++i) padded[i] = x(i) - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (auto& f : freq) f = std::norm(f);
  std::vector<double> back;
  fft.inv(back, freq);
  VectorXd acov(n);
  for (Index lag = 0; lag < n; ++lag) acov(lag) = back[lag] / static_cast<double>(n);
  return acov;
}

double ess_of(const MatrixXd& split) {
  const Index n = split.rows();
  const Index m = split.cols();
  const double nd = static_cast<double>(n);
  std::vector<VectorXd> acov(static_cast<size_t>(m));
  VectorXd means(m);
  VectorXd vars(m);
  for (Index c = 0; c < m; ++c) {
    acov[c] = autocovariance(split.col(c));
    means(c) = split.col(c).mean();
    vars(c) = acov[c](0) * nd / (nd - 1.0);
  }
  const double mean_var = vars.mean();
  double var_plus = mean_var * (nd - 1.0) / nd;
  if (m > 1) {
    const double grand = means.mean();
    var_plus += (means.array() - grand).square().sum() / static_cast<double>(m - 1);
  }
  auto rho_at = [&](Index lag) {
    double acov_mean = 0.0;
    for (Index c = 0; c < m; ++c) acov_mean += acov[c](lag);
    acov_mean /= static_cast<double>(m);
    return 1.0 - (mean_var - acov_mean) / var_plus;
  };

  VectorXd rho_hat = VectorXd::Zero(n);
  rho_hat(0) = 1.0;
  double rho_even = 1.0;
  double rho_odd = rho_at(1);
  rho_hat(1) = rho_odd;
  Index t = 1;
  while (t < n - 4 && (rho_even + rho_odd) > 0.0) {
    rho_even = rho_at(t + 1);
    rho_odd = rho_at(t + 2);
    if (rho_even + rho_odd >= 0.0) {
      rho_hat(t + 1) = rho_even;
      rho_hat(t + 2) = rho_odd;
    }
    t += 2;
  }
  const Index max_t = t;
  if (rho_even > 0.0) rho_hat(max_t + 1) = rho_even;

  // Initial monotone sequence.
  for (Index k = 1; k + 3 <= max_t; k += 2) {
    if (rho_hat(k + 1) + rho_hat(k + 2) > rho_hat(k - 1) + rho_hat(k)) {
      rho_hat(k + 1) = (rho_hat(k - 1) + rho_hat(k)) / 2.0;
      rho_hat(k + 2) = rho_hat(k + 1);
    }
  }
  const double total = nd * static_cast<double>(m);
  double tau = -1.0 + 2.0 * rho_hat.head(max_t).sum() + rho_hat(max_t + 1);
  tau = std::max(tau, 1.0 / std::log10(total));
  return std::min(total / tau, total);
}

MatrixXd rank_normalize(const MatrixXd& chains) {
  const Index total = chains.size();
  std::vector<Index> order(static_cast<size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  const double* data = chains.data();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return data[a] < data[b]; });
  MatrixXd out(chains.rows(), chains.cols());
  double* o = out.data();
  const boost::math::normal_distribution<> std_normal;
  // Average ranks over ties.
  Index i = 0;
  while (i < total) {
    Index j = i;
    while (j + 1 < total && data[order[j + 1]] == data[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double z = boost::math::quantile(std_normal, (rank - 0.375) / (static_cast<double>(total) + 0.25));
    for (Index k = i; k <= j; ++k) o[order[k]] = z;
    i = j + 1;
  }
  return out;
}

}  // namespace

DiagnosticValue split_rhat(const MatrixXd& chains) {
  require_shape(chains);
  if (all_constant(chains)) return {1.0, true};
  const MatrixXd split = split_chains(chains);
  const double r = rhat_of(split);
  if (!std::isfinite(r)) return {1.0, true};
  return {r, false};
}

DiagnosticValue ess_bulk(const MatrixXd& chains) {
  require_shape(chains);
  if (all_constant(chains)) return {0.0, true};
  const MatrixXd split = split_chains(rank_normalize(chains));
  const double e = ess_of(split);
  if (!std::isfinite(e)) return {0.0, true};
  return {std::min(e, static_cast<double>(chains.size())), false};
}

double quantile(VectorXd values, double prob) {
  if (values.size() == 0) throw DomainError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile probability must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<Index>(std::floor(h));
  const Index hi = std::min<Index>(lo + 1, values.size() - 1);
  return values(lo) + (h - static_cast<double>(lo)) * (values(hi) - values(lo));
}

double DiagnosticsReport::max_rhat(const std::string& prefix) const {
  double out = 0.0;
  for (const auto& p : parameters)
    if (p.name.rfind(prefix, 0) == 0 && !p.degenerate) out = std::max(out, p.rhat);
  return out;
}

double DiagnosticsReport::min_ess(const std::string& prefix) const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& p : parameters)
    if (p.name.rfind(prefix, 0) == 0 && !p.degenerate) out = std::min(out, p.ess_bulk);
  return out;
}

double DiagnosticsReport::rhat_share(const std::string& prefix, double bound) const {
  long total = 0;
  long ok = 0;
  for (const auto& p : parameters) {
    if (p.name.rfind(prefix, 0) != 0) continue;
    ++total;
    if (p.degenerate || p.rhat <= bound) ++ok;
  }
  return total == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(ok) / static_cast<double>(total);
}

std::string DiagnosticsReport::to_text() const {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "total_draws: " << total_draws << "\n";
  out << "divergences: " << divergences << "\n";
  out << "depth_limit_hits: " << depth_limit_hits << "\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  for (const auto& p : parameters) {
    out << "\nparameter: " << p.name << "\n";
    out << "mean: " << p.mean << "\n";
    out << "sd: " << p.sd << "\n";
    out << "q2.5: " << p.q025 << "\n";
    out << "q50: " << p.q50 << "\n";
    out << "q97.5: " << p.q975 << "\n";
    out << "rhat: " << p.rhat << "\n";
    out << "ess_bulk: " << p.ess_bulk << "\n";
    if (p.degenerate) out << "degenerate: true\n";
  }
  return out.str();
}

DiagnosticsReport diagnose(const DrawMatrix& draws) {
  DiagnosticsReport rep;
  rep.divergences = draws.divergences();
  rep.depth_limit_hits = draws.depth_limit_hits();
  rep.total_draws = static_cast<long>(draws.draws_per_chain() * draws.num_chains());
  rep.warnings = draws.warnings;
  for (size_t k = 0; k < draws.names.size(); ++k) {
    const MatrixXd col = draws.column(static_cast<Index>(k));
    const VectorXd flat = col.reshaped();
    ParameterSummary s;
    s.name = draws.names[k];
    s.mean = flat.mean();
    s.sd = flat.size() > 1 ? std::sqrt((flat.array() - s.mean).square().sum() / static_cast<double>(flat.size() - 1))
                           : 0.0;
    s.q025 = quantile(flat, 0.025);
    s.q50 = quantile(flat, 0.5);
    s.q975 = quantile(flat, 0.975);
    if (col.rows() >= 4) {
      const auto r = split_rhat(col);
      const auto e = ess_bulk(col);
      s.rhat = r.value;
      s.ess_bulk = e.value;
      s.degenerate = r.degenerate || e.degenerate;
    } else {
      s.rhat = std::numeric_limits<double>::quiet_NaN();
      s.ess_bulk = std::numeric_limits<double>::quiet_NaN();
      s.degenerate = true;
    }
    rep.parameters.push_back(s);
  }
  return rep;
}

std::string trace_csv(const DrawMatrix& draws, const std::vector<std::string>& params) {
  std::vector<Index> idx;
  for (const auto& name : params) idx.push_back(draws.index_of(name));
  CsvTable table;
  table.header = {"chain", "iteration", "parameter", "value"};
  for (Index c = 0; c < draws.num_chains(); ++c)
    for (Index it = 0; it < draws.draws_per_chain(); ++it)
      for (size_t k = 0; k < idx.size(); ++k)
        table.rows.push_back({std::to_string(c + 1), std::to_string(it + 1), params[k],
                              format_double(draws.chains[c].values(it, idx[k]))});
  return write_csv(table);
}

void export_trace(const DrawMatrix& draws, const std::vector<std::string>& params, const std::string& path) {
  write_file_atomic(path, trace_csv(draws, params));
}

}  // namespace becca
