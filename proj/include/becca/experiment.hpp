#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "becca/datagen.hpp"
#include "becca/diagnostics.hpp"
#include "becca/evaluation.hpp"
#include "becca/models.hpp"
#include "becca/nuts.hpp"

namespace becca {

struct FitResult {
  DrawMatrix draws;
  DiagnosticsReport diagnostics;
  VectorXd beta_mean;
  VectorXd beta_median;
  double intercept_mean = 0.0;
};

/// Builds the posterior target and runs all chains.
FitResult fit_model(const Dataset& data, const TargetOptions& target, const NutsConfig& nuts);

/// Settings shared by replicate and CV experiments.
struct ExperimentConfig {
  std::vector<PriorKind> priors{PriorKind::becca, PriorKind::hs};
  ModelKind model = ModelKind::linear;
  Parameterization param = Parameterization::automatic;
  InverseGammaHyper ig;
  double a_dl = 0.0;
  bool intercept = false;
  NutsConfig nuts;
  int replicates = 50;
  bool cv = false;
  int cv_folds = 5;
  bool cv_standardize = false;
  double threshold = 0.5;
  bool use_median = false;  ///< beta-hat from posterior medians instead of means
  int threads = 0;
  double max_failure_fraction = 0.2;
  std::uint64_t seed = 0;
};

/// Metrics of one prior on one replicate.
struct ReplicateRecord {
  int replicate = 0;
  PriorKind prior = PriorKind::becca;
  bool ok = true;
  std::string error;
  std::map<std::string, double> metrics;  ///< NaN marks an undefined value
};

struct MetricSummary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  long count = 0;
  /// (this prior - BECCA), over replicates where both are defined.
  double diff_mean = std::numeric_limits<double>::quiet_NaN();
  double diff_se = std::numeric_limits<double>::quiet_NaN();
  long diff_count = 0;
};

struct ExperimentReport {
  std::string kind;
  std::map<std::string, std::string> setting;  ///< descriptive key/value pairs
  std::vector<PriorKind> priors;
  std::vector<std::string> metrics;
  std::vector<ReplicateRecord> records;
  /// summary[metric][prior]
  std::map<std::string, std::map<std::string, MetricSummary>> summary;
  long failures = 0;

  void summarize();
  std::string to_json() const;
  /// One row per metric; mean/se per prior and difference-vs-BECCA columns.
  std::string to_csv() const;
};

/// Seed of the fit of `prior` on replicate r.
std::uint64_t fit_seed(std::uint64_t seed, int replicate, PriorKind prior);

/// For each replicate r: data from stream r of sim.seed, one fit per prior,
/// MSE / sensitivity / specificity (and CV MSPE when requested). Failed
/// fits are recorded; more than max_failure_fraction failures throws.
ExperimentReport run_replicates(const SimSpec& sim, const ExperimentConfig& cfg);

/// K-fold CV on observed data per prior; `replicates` independent fold
/// assignments. MSPE for the linear model, ACC/Spec/Sens/AUC/F1 for the
/// logistic one.
ExperimentReport run_cv(const Dataset& data, const ExperimentConfig& cfg);

}  // namespace becca
