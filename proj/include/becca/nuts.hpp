#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "becca/log_density.hpp"
#include "becca/rng.hpp"

namespace becca {

struct NutsConfig {
  int warmup = 5000;
  int draws = 5000;
  int chains = 4;
  double target_accept = 0.8;
  int max_tree_depth = 10;
  std::uint64_t seed = 0;
  /// Initial coordinates are uniform on (-init_jitter, init_jitter).
  double init_jitter = 2.0;
  /// Worker threads for chains; 0 means all hardware threads.
  int threads = 0;
  bool adapt = true;
  /// Fixed step size when adaptation is off.
  double step_size = 0.1;
  /// Optional initial point (unconstrained); overrides the jittered draw.
  std::optional<VectorXd> init;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct DrawStats {
  double accept_stat = 0.0;
  int tree_depth = 0;
  int n_leapfrog = 0;
  bool divergent = false;
  double energy = 0.0;
  double step_size = 0.0;
};

struct ChainDraws {
  MatrixXd values;  ///< draws x parameters, constrained scale
  std::vector<DrawStats> stats;
  double step_size = 0.0;
  VectorXd inv_metric;
};

struct DrawMatrix {
  std::vector<std::string> names;
  std::vector<ChainDraws> chains;
  std::vector<std::string> warnings;
  int max_tree_depth = 10;

  Index num_chains() const { return static_cast<Index>(chains.size()); }
  Index draws_per_chain() const { return chains.empty() ? 0 : chains.front().values.rows(); }
  /// Throws std::out_of_range listing the available names.
  Index index_of(const std::string& name) const;
  bool has(const std::string& name) const;
  /// draws x chains matrix of one parameter.
  MatrixXd column(const std::string& name) const;
  MatrixXd column(Index k) const;
  /// All chains stacked, (chains * draws) x parameters.
  MatrixXd pooled() const;
  long divergences() const;
  long depth_limit_hits() const;
};

struct PhasePoint {
  VectorXd z;
  VectorXd r;
  VectorXd grad;
  double lp = 0.0;
};

/// One leapfrog step with a diagonal metric: half momentum step, full
/// position step scaled by inv_mass, half momentum step. A rejected target
/// value leaves lp = kRejected.
void leapfrog(PhasePoint& point, double eps, const LogDensityModel& target, const VectorXd& inv_mass);

/// -lp + r' diag(inv_mass) r / 2; +inf for rejected points.
double hamiltonian(const PhasePoint& point, const VectorXd& inv_mass);

/// Single chain `chain` (stream id) of NUTS with warmup adaptation.
ChainDraws nuts_chain(const LogDensityModel& target, const NutsConfig& config, int chain);

/// One chain (index 0) wrapped as a DrawMatrix.
DrawMatrix nuts_sample(const LogDensityModel& target, const NutsConfig& config);

/// config.chains chains; chain c uses RngStream(seed, c). Output does not
/// depend on the thread count. Throws SamplerError naming the chain whose
/// initialization failed.
DrawMatrix run_chains(const LogDensityModel& target, const NutsConfig& config);

}  // namespace becca
