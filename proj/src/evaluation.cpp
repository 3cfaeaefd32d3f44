#include "becca/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "becca/csv.hpp"
#include "becca/diagnostics.hpp"
#include "becca/errors.hpp"
#include "becca/parallel.hpp"

namespace becca {

double mse(const VectorXd& beta_true, const VectorXd& beta_hat) {
  if (beta_true.size() != beta_hat.size()) throw DomainError("mse: length mismatch");
  if (beta_true.size() == 0) throw DomainError("mse: empty vectors");
  return (beta_true - beta_hat).squaredNorm() / static_cast<double>(beta_true.size());
}

namespace {

void require_binary(const VectorXi& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i)
    if (v(i) != 0 && v(i) != 1) throw DomainError(std::string(what) + " must be 0/1");
}

Rate ratio(double num, double den) {
  if (den == 0.0) return {};
  return {num / den, true};
}

}  // namespace

SensSpec sens_spec(const VectorXi& indicator, const VectorXi& truth) {
  if (indicator.size() != truth.size()) throw DomainError("sens_spec: length mismatch");
  require_binary(indicator, "indicator");
  require_binary(truth, "truth");
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (Index j = 0; j < truth.size(); ++j) {
    if (truth(j) == 1) (indicator(j) == 1 ? tp : fn) += 1;
    else (indicator(j) == 1 ? fp : tn) += 1;
  }
  return {ratio(tp, tp + fn), ratio(tn, tn + fp)};
}

MatrixXd inclusion_criterion_draws(const DrawMatrix& draws, PriorKind prior) {
  if (prior == PriorKind::dl) throw ConfigError("selection is not supported for the Dirichlet-Laplace prior");
  const MatrixXd all = draws.pooled();
  const std::string base = prior == PriorKind::becca ? "gamma[" : "lambda[";
  Index p = 0;
  while (draws.has(base + std::to_string(p + 1) + "]")) ++p;
  if (p == 0) throw DataError("draws carry no " + base.substr(0, base.size() - 1) + " columns");
  MatrixXd out(all.rows(), p);
  switch (prior) {
    case PriorKind::becca:
      for (Index j = 0; j < p; ++j) out.col(j) = all.col(draws.index_of("gamma[" + std::to_string(j + 1) + "]"));
      break;
    case PriorKind::hs:
    case PriorKind::hsplus: {
      const VectorXd tau = all.col(draws.index_of("tau"));
      for (Index j = 0; j < p; ++j) {
        const std::string idx = "[" + std::to_string(j + 1) + "]";
        VectorXd local = all.col(draws.index_of("lambda" + idx));
        if (prior == PriorKind::hsplus) local = local.cwiseProduct(all.col(draws.index_of("eta" + idx)));
        for (Index k = 0; k < all.rows(); ++k) out(k, j) = 1.0 - kappa(local(k), tau(k));
      }
      break;
    }
    case PriorKind::dl:
      throw ConfigError("selection is not supported for the Dirichlet-Laplace prior");
  }
  return out;
}

SelectionResult select(const DrawMatrix& draws, PriorKind prior, double threshold) {
  const MatrixXd crit = inclusion_criterion_draws(draws, prior);
  SelectionResult res;
  res.threshold = threshold;
  res.criterion.resize(crit.cols());
  res.indicator.resize(crit.cols());
  for (Index j = 0; j < crit.cols(); ++j) {
    res.criterion(j) = quantile(crit.col(j), 0.5);
    res.indicator(j) = res.criterion(j) > threshold ? 1 : 0;
  }
  return res;
}

std::string bit_key(const VectorXi& inclusion) {
  std::string key(static_cast<size_t>(inclusion.size()), '0');
  for (Index j = 0; j < inclusion.size(); ++j) key[j] = inclusion(j) ? '1' : '0';
  return key;
}

ModelPosterior model_posterior(const MatrixXd& criterion_draws, RngStream& rng) {
  ModelPosterior mp;
  mp.p = criterion_draws.cols();
  mp.iterates = static_cast<long>(criterion_draws.rows());
  std::map<std::string, long> counts;
  std::string key(static_cast<size_t>(mp.p), '0');
  for (Index k = 0; k < criterion_draws.rows(); ++k) {
    for (Index j = 0; j < mp.p; ++j) key[j] = rng.bernoulli(criterion_draws(k, j)) ? '1' : '0';
    ++counts[key];
  }
  for (const auto& [k, c] : counts)
    mp.probabilities[k] = static_cast<double>(c) / static_cast<double>(mp.iterates);
  return mp;
}

ModelPosterior model_posterior(const DrawMatrix& draws, PriorKind prior, RngStream& rng) {
  return model_posterior(inclusion_criterion_draws(draws, prior), rng);
}

double prob_true_model(const ModelPosterior& mp, const VectorXi& truth) {
  const auto it = mp.probabilities.find(bit_key(truth));
  return it == mp.probabilities.end() ? 0.0 : it->second;
}

std::vector<std::pair<std::string, double>> top_k_models(const ModelPosterior& mp, int k) {
  if (k < 1) throw DomainError("top_k_models: k must be at least 1");
  std::vector<std::pair<std::string, double>> all(mp.probabilities.begin(), mp.probabilities.end());
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<int>(all.size()) > k) all.resize(static_cast<size_t>(k));
  return all;
}

std::string heatmap_csv(const std::vector<std::pair<std::string, double>>& models, Index p) {
  CsvTable t;
  for (Index j = 0; j < p; ++j) t.header.push_back("x" + std::to_string(j + 1));
  t.header.emplace_back("probability");
  for (const auto& [key, prob] : models) {
    std::vector<std::string> row;
    for (char c : key) row.emplace_back(1, c);
    row.push_back(format_double(prob));
    t.rows.push_back(std::move(row));
  }
  return write_csv(t);
}

namespace {

void check_prediction_dims(const MatrixXd& X, const VectorXd& a, const VectorXd& b) {
  if (X.cols() != a.size() || X.cols() != b.size()) throw DomainError("prediction: dimension mismatch");
  if (X.rows() == 0) throw DomainError("prediction: empty test set");
}

}  // namespace

double mspe_linear(const MatrixXd& X_test, const VectorXd& beta_true, const VectorXd& beta_hat) {
  check_prediction_dims(X_test, beta_true, beta_hat);
  return (X_test * (beta_true - beta_hat)).squaredNorm() / static_cast<double>(X_test.rows());
}

double mspe_logistic(const MatrixXd& X_test, const VectorXd& beta_true, const VectorXd& beta_hat) {
  check_prediction_dims(X_test, beta_true, beta_hat);
  const VectorXd e1 = X_test * beta_true;
  const VectorXd e2 = X_test * beta_hat;
  double s = 0.0;
  for (Index i = 0; i < e1.size(); ++i) {
    const double d = inv_logit(e1(i)) - inv_logit(e2(i));
    s += d * d;
  }
  return s / static_cast<double>(e1.size());
}

double mspe_observed(const MatrixXd& X_test, const VectorXd& y_test, const VectorXd& beta_hat, double intercept) {
  if (X_test.cols() != beta_hat.size() || X_test.rows() != y_test.size())
    throw DomainError("mspe_observed: dimension mismatch");
  if (X_test.rows() == 0) throw DomainError("mspe_observed: empty test set");
  VectorXd pred = X_test * beta_hat;
  pred.array() += intercept;
  return (y_test - pred).squaredNorm() / static_cast<double>(y_test.size());
}

ClassificationMetrics classification_metrics(const VectorXd& y_true, const VectorXd& prob_hat, double threshold) {
  if (y_true.size() != prob_hat.size()) throw DomainError("classification_metrics: length mismatch");
  if (y_true.size() == 0) throw DomainError("classification_metrics: empty input");
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (Index i = 0; i < y_true.size(); ++i) {
    if (y_true(i) != 0.0 && y_true(i) != 1.0) throw DomainError("classification_metrics: y must be 0/1");
    const bool pos = prob_hat(i) > threshold;
    if (y_true(i) == 1.0) (pos ? tp : fn) += 1;
    else (pos ? fp : tn) += 1;
  }
  ClassificationMetrics m;
  m.acc = 100.0 * (tp + tn) / static_cast<double>(y_true.size());
  m.sens = ratio(tp, tp + fn);
  m.spec = ratio(tn, tn + fp);
  m.f1 = ratio(2 * tp, 2 * tp + fp + fn);

  const double n_pos = tp + fn;
  const double n_neg = tn + fp;
  if (n_pos > 0 && n_neg > 0) {
    const Index n = y_true.size();
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return prob_hat(a) < prob_hat(b); });
    double rank_sum = 0.0;
    Index i = 0;
    while (i < n) {
      Index j = i;
      while (j + 1 < n && prob_hat(order[j + 1]) == prob_hat(order[i])) ++j;
      const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
      for (Index k = i; k <= j; ++k)
        if (y_true(order[k]) == 1.0) rank_sum += mid;
      i = j + 1;
    }
    m.auc = {(rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg), true};
  }
  return m;
}

VectorXi fold_assignment(Index n, int k, RngStream& rng) {
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");
  if (n < k) throw ConfigError("cross-validation needs at least k observations");
  std::vector<int> labels(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) labels[i] = static_cast<int>(i % k);
  // Fisher-Yates with the stream's own uniforms (portable across standard libraries).
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(labels[i], labels[std::min(j, i)]);
  }
  VectorXi out(n);
  for (Index i = 0; i < n; ++i) out(i) = labels[i];
  return out;
}

namespace {

Dataset subset(const Dataset& d, const std::vector<Index>& rows) {
  Dataset out;
  out.X.resize(static_cast<Index>(rows.size()), d.p());
  out.y.resize(static_cast<Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Index>(r)) = d.X.row(rows[r]);
    out.y(static_cast<Index>(r)) = d.y(rows[r]);
  }
  out.true_beta = d.true_beta;
  out.true_inclusion = d.true_inclusion;
  return out;
}

bool single_class(const VectorXd& y) { return y.size() == 0 || (y.array() == y(0)).all(); }

}  // namespace

CvResult kfold_cv(const Dataset& data, const CvOptions& options,
                  const std::function<FoldFit(const Dataset& train, int fold)>& fit,
                  const std::function<VectorXd(const Dataset& test, const FoldFit& fit)>& metric, RngStream& rng,
                  int threads) {
  const int k = options.k;
  VectorXi folds;
  std::vector<std::vector<Index>> train_rows, test_rows;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= options.max_attempts)
      throw DataError("cross-validation: every fold assignment left a split with a single class");
    folds = fold_assignment(data.n(), k, rng);
    train_rows.assign(static_cast<size_t>(k), {});
    test_rows.assign(static_cast<size_t>(k), {});
    for (Index i = 0; i < data.n(); ++i)
      for (int f = 0; f < k; ++f) (folds(i) == f ? test_rows[f] : train_rows[f]).push_back(i);
    if (options.model != ModelKind::logistic) break;
    bool ok = true;
    for (int f = 0; f < k && ok; ++f) {
      const Dataset tr = subset(data, train_rows[f]);
      ok = !single_class(tr.y);
    }
    if (ok) break;
  }

  CvResult res;
  res.per_fold.resize(static_cast<size_t>(k));
  parallel_for(k, threads, [&](int f) {
    Dataset train = subset(data, train_rows[f]);
    Dataset test = subset(data, test_rows[f]);
    if (options.standardize) {
      train = standardize(train, options.model);
      test = apply_standardization(test, train, options.model);
    }
    const FoldFit ff = fit(train, f);
    res.per_fold[f] = metric(test, ff);
  });
  res.mean = VectorXd::Zero(res.per_fold.front().size());
  for (const auto& v : res.per_fold) res.mean += v;
  res.mean /= static_cast<double>(k);
  return res;
}

}  // namespace becca
