#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "becca/datagen.hpp"
#include "becca/nuts.hpp"

namespace becca {

/// Mean squared coordinate error.
double mse(const VectorXd& beta_true, const VectorXd& beta_hat);

/// A ratio that may be undefined (empty denominator class).
struct Rate {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
};

struct SensSpec {
  Rate sensitivity;
  Rate specificity;
};

/// Confusion-matrix rates of a 0/1 estimate against 0/1 truth.
SensSpec sens_spec(const VectorXi& indicator, const VectorXi& truth);

struct SelectionResult {
  VectorXi indicator;
  VectorXd criterion;
  double threshold = 0.5;
};

/// Per-draw inclusion criterion matrix ((chains*draws) x p): gamma for
/// BECCA, 1 - kappa for HS/HS+. Throws ConfigError for DL.
MatrixXd inclusion_criterion_draws(const DrawMatrix& draws, PriorKind prior);

/// Median of the criterion over all draws, thresholded strictly.
SelectionResult select(const DrawMatrix& draws, PriorKind prior, double threshold = 0.5);

/// Inclusion bit-vectors as '0'/'1' strings mapped to probabilities.
struct ModelPosterior {
  std::map<std::string, double> probabilities;
  long iterates = 0;
  Index p = 0;
};

/// Draws I_j ~ Bernoulli(criterion_j) per stored iterate and tabulates.
ModelPosterior model_posterior(const MatrixXd& criterion_draws, RngStream& rng);
ModelPosterior model_posterior(const DrawMatrix& draws, PriorKind prior, RngStream& rng);

std::string bit_key(const VectorXi& inclusion);
double prob_true_model(const ModelPosterior& mp, const VectorXi& truth);

/// Highest-probability models; ties go to the lexicographically smaller key.
std::vector<std::pair<std::string, double>> top_k_models(const ModelPosterior& mp, int k);
/// Heatmap CSV: columns x1..xp (0/1) and probability.
std::string heatmap_csv(const std::vector<std::pair<std::string, double>>& models, Index p);

double mspe_linear(const MatrixXd& X_test, const VectorXd& beta_true, const VectorXd& beta_hat);
double mspe_logistic(const MatrixXd& X_test, const VectorXd& beta_true, const VectorXd& beta_hat);
/// Out-of-sample squared error against observed responses.
double mspe_observed(const MatrixXd& X_test, const VectorXd& y_test, const VectorXd& beta_hat,
                     double intercept = 0.0);

struct ClassificationMetrics {
  double acc = 0.0;  ///< percent
  Rate spec;
  Rate sens;
  Rate auc;
  Rate f1;
};

/// Predicted positive when prob > threshold. AUC from the Mann-Whitney
/// statistic with mid-ranks for ties.
ClassificationMetrics classification_metrics(const VectorXd& y_true, const VectorXd& prob_hat,
                                             double threshold = 0.5);

/// Fold labels 0..k-1 with sizes differing by at most one, in random order.
VectorXi fold_assignment(Index n, int k, RngStream& rng);

/// A fitted predictor on the training split's coordinate system.
struct FoldFit {
  VectorXd beta;
  double intercept = 0.0;
};

struct CvOptions {
  int k = 5;
  bool standardize = false;
  ModelKind model = ModelKind::linear;
  int max_attempts = 10;
};

struct CvResult {
  VectorXd mean;                  ///< per metric
  std::vector<VectorXd> per_fold;  ///< one vector of metrics per fold
};

/// Fits on each training split and scores the held-out split. With
/// `standardize`, centering and scaling come from the training split only.
/// For logistic data, assignments giving a single-class training or test
/// split are redrawn (up to max_attempts).
CvResult kfold_cv(const Dataset& data, const CvOptions& options,
                  const std::function<FoldFit(const Dataset& train, int fold)>& fit,
                  const std::function<VectorXd(const Dataset& test, const FoldFit& fit)>& metric, RngStream& rng,
                  int threads = 1);

}  // namespace becca
