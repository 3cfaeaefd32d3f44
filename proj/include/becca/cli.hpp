#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "becca/datagen.hpp"
#include "becca/experiment.hpp"

namespace becca {

/// Every setting a subcommand can read, after config file, environment
/// and flags have been merged.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  std::string out = "becca_out";
  int threads = 0;
  std::string model = "linear";
  std::vector<std::string> priors;

  int chains = 4;
  int warmup = 5000;
  int draws = 5000;
  double target_accept = 0.8;
  int max_depth = 10;
  double init_jitter = 2.0;
  std::string param = "auto";

  double ig_a = 0.5;
  double ig_b = 0.5;
  double a_dl = 0.0;
  std::string intercept = "auto";

  long n = 100;
  long p = 50;
  long q = 10;
  std::string covariance = "auto";
  double rho = -1.0;  ///< negative: model default
  std::string law = "auto";
  double g = 0.0;
  double sigma2 = 1.0;
  double lo = 2.0;
  double hi = 7.5;
  double value = 2.5;
  bool permute = false;

  int replicates = 50;
  bool cv = false;
  int folds = 5;
  std::string standardize = "auto";
  double threshold = 0.5;
  int top_k = 100;
  bool use_median = false;
  bool select = false;

  std::string data;
  std::string truth;
  std::string response = "y";
  std::string draws_file;
  std::vector<std::string> trace;

  int gamma_points = 99;
  double beta_max = 5.0;
  int beta_points = 100;
  double logit_max = 700.0;
  int logit_points = 1401;
  double tol = 1e-6;
};

/// Pieces of RunConfig converted and validated; throws ConfigError.
ModelKind resolved_model(const RunConfig& cfg);
std::vector<PriorKind> resolved_priors(const RunConfig& cfg);
NutsConfig resolved_nuts(const RunConfig& cfg);
SimSpec resolved_sim(const RunConfig& cfg);
ExperimentConfig resolved_experiment(const RunConfig& cfg);

void cmd_simulate(const RunConfig& cfg, const std::string& resolved_config);
void cmd_fit(const RunConfig& cfg, const std::string& resolved_config);
void cmd_replicate(const RunConfig& cfg, const std::string& resolved_config);
void cmd_cv(const RunConfig& cfg, const std::string& resolved_config);
void cmd_select(const RunConfig& cfg, const std::string& resolved_config);
void cmd_marginal(const RunConfig& cfg, const std::string& resolved_config);

/// Reads a draw CSV written by `fit` back into a DrawMatrix.
DrawMatrix read_draws_csv(const std::string& text);
std::string draws_csv(const DrawMatrix& draws);

/// Entry point; returns the process exit code (0 ok, 2 config, 3 data,
/// 4 sampler, 1 anything else).
int run_cli(int argc, const char* const* argv);

}  // namespace becca
