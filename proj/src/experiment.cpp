#include "becca/experiment.hpp"

#include <cmath>
#include <json.hpp>

#include "becca/csv.hpp"
#include "becca/errors.hpp"
#include "becca/parallel.hpp"

namespace becca {

FitResult fit_model(const Dataset& data, const TargetOptions& target, const NutsConfig& nuts) {
  const PosteriorTarget post(data, target);
  FitResult res;
  res.draws = run_chains(post, nuts);
  res.diagnostics = diagnose(res.draws);
  const Index p = data.p();
  const MatrixXd all = res.draws.pooled();
  res.beta_mean = all.leftCols(p).colwise().mean().transpose();
  res.beta_median.resize(p);
  for (Index j = 0; j < p; ++j) res.beta_median(j) = quantile(all.col(j), 0.5);
  if (target.intercept) res.intercept_mean = all.col(res.draws.index_of("intercept")).mean();
  return res;
}

std::uint64_t fit_seed(std::uint64_t seed, int replicate, PriorKind prior) {
  return derive_seed(seed, static_cast<std::uint64_t>(replicate), static_cast<std::uint64_t>(prior) + 1);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TargetOptions target_for(const ExperimentConfig& cfg, PriorKind prior) {
  TargetOptions t;
  t.model = cfg.model;
  t.prior = prior;
  t.param = cfg.param;
  t.ig = cfg.ig;
  t.a_dl = cfg.a_dl;
  t.intercept = cfg.intercept;
  return t;
}

NutsConfig nuts_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  NutsConfig n = cfg.nuts;
  n.seed = seed;
  n.threads = 1;  // parallelism lives at the task level
  return n;
}

double value_or_nan(const Rate& r) { return r.defined ? r.value : kNaN; }

void add_convergence(ReplicateRecord& rec, const FitResult& fit) {
  rec.metrics["max_rhat_beta"] = fit.diagnostics.max_rhat("beta[");
  rec.metrics["rhat_ok_beta"] = fit.diagnostics.rhat_share("beta[", 1.05);
  rec.metrics["divergences"] = static_cast<double>(fit.diagnostics.divergences);
}

void check_failures(const ExperimentReport& rep, double max_fraction) {
  const double total = static_cast<double>(rep.records.size());
  if (total > 0 && static_cast<double>(rep.failures) > max_fraction * total) {
    std::string first;
    for (const auto& r : rep.records)
      if (!r.ok) {
        first = r.error;
        break;
      }
    throw SamplerError(std::to_string(rep.failures) + " of " + std::to_string(rep.records.size()) +
                       " fits failed; first failure: " + first);
  }
}

std::string fmt(double x) { return std::isnan(x) ? "" : format_double(x); }

}  // namespace

ExperimentReport run_replicates(const SimSpec& sim, const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (cfg.priors.empty()) throw ConfigError("at least one prior is required");
  sim.validate();
  cfg.nuts.validate();
  if (sim.model != cfg.model) throw ConfigError("simulation model and fitted model differ");

  ExperimentReport rep;
  rep.kind = "replicate";
  rep.priors = cfg.priors;
  rep.metrics = {"mse", "sensitivity", "specificity", "prob_true_model"};
  if (cfg.cv) rep.metrics.emplace_back("mspe");
  rep.metrics.emplace_back("max_rhat_beta");
  rep.metrics.emplace_back("rhat_ok_beta");
  rep.metrics.emplace_back("divergences");
  rep.setting = {{"model", to_string(sim.model)},
                 {"n", std::to_string(sim.n)},
                 {"p", std::to_string(sim.p)},
                 {"q", std::to_string(sim.q)},
                 {"coefficient_law", to_string(sim.law)},
                 {"replicates", std::to_string(cfg.replicates)},
                 {"seed", std::to_string(sim.seed)}};

  const int np = static_cast<int>(cfg.priors.size());
  const int tasks = cfg.replicates * np;
  rep.records.resize(static_cast<size_t>(tasks));
  std::vector<Dataset> datasets(static_cast<size_t>(cfg.replicates));
  parallel_for(cfg.replicates, cfg.threads, [&](int r) { datasets[r] = generate(sim, static_cast<std::uint64_t>(r)); });

  parallel_for(tasks, cfg.threads, [&](int task) {
    const int r = task / np;
    const PriorKind prior = cfg.priors[static_cast<size_t>(task % np)];
    ReplicateRecord& rec = rep.records[task];
    rec.replicate = r;
    rec.prior = prior;
    const Dataset& data = datasets[r];
    try {
      const TargetOptions target = target_for(cfg, prior);
      const FitResult fit = fit_model(data, target, nuts_for(cfg, fit_seed(sim.seed, r, prior)));
      const VectorXd& beta_hat = cfg.use_median ? fit.beta_median : fit.beta_mean;
      rec.metrics["mse"] = mse(*data.true_beta, beta_hat);
      rec.metrics["sensitivity"] = kNaN;
      rec.metrics["specificity"] = kNaN;
      rec.metrics["prob_true_model"] = kNaN;
      if (prior != PriorKind::dl) {
        const SelectionResult sel = select(fit.draws, prior, cfg.threshold);
        const SensSpec ss = sens_spec(sel.indicator, *data.true_inclusion);
        rec.metrics["sensitivity"] = value_or_nan(ss.sensitivity);
        rec.metrics["specificity"] = value_or_nan(ss.specificity);
        RngStream mp_rng(derive_seed(sim.seed, static_cast<std::uint64_t>(r), 2000 + static_cast<std::uint64_t>(prior)), 0);
        const ModelPosterior mp = model_posterior(fit.draws, prior, mp_rng);
        rec.metrics["prob_true_model"] = prob_true_model(mp, *data.true_inclusion);
      }
      add_convergence(rec, fit);
      if (cfg.cv) {
        CvOptions cvo;
        cvo.k = cfg.cv_folds;
        cvo.standardize = cfg.cv_standardize;
        cvo.model = cfg.model;
        RngStream fold_rng(derive_seed(sim.seed, static_cast<std::uint64_t>(r), 1000), 0);
        auto fitter = [&](const Dataset& train, int fold) {
          const FitResult f = fit_model(
              train, target,
              nuts_for(cfg, derive_seed(fit_seed(sim.seed, r, prior), 3000, static_cast<std::uint64_t>(fold))));
          FoldFit ff;
          ff.beta = cfg.use_median ? f.beta_median : f.beta_mean;
          ff.intercept = f.intercept_mean;
          if (cfg.cv_standardize) ff.beta = ff.beta.cwiseQuotient(train.x_scale);
          return ff;
        };
        auto scorer = [&](const Dataset& test, const FoldFit& ff) {
          // Score on the original predictor scale against the true coefficients.
          MatrixXd X = test.X;
          if (cfg.cv_standardize)
            X = (test.X.array().rowwise() * test.x_scale.transpose().array()).rowwise() + test.x_mean.transpose().array();
          VectorXd m(1);
          m(0) = cfg.model == ModelKind::linear ? mspe_linear(X, *data.true_beta, ff.beta)
                                                : mspe_logistic(X, *data.true_beta, ff.beta);
          return m;
        };
        const CvResult cvr = kfold_cv(data, cvo, fitter, scorer, fold_rng, 1);
        rec.metrics["mspe"] = cvr.mean(0);
      }
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
      rec.metrics.clear();
    }
  });
  for (const auto& r : rep.records) rep.failures += r.ok ? 0 : 1;
  check_failures(rep, cfg.max_failure_fraction);
  rep.summarize();
  return rep;
}

ExperimentReport run_cv(const Dataset& data, const ExperimentConfig& cfg) {
  if (cfg.priors.empty()) throw ConfigError("at least one prior is required");
  if (cfg.cv_folds < 2) throw ConfigError("cv folds must be at least 2");
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  cfg.nuts.validate();
  data.validate(cfg.model);

  ExperimentReport rep;
  rep.kind = "cv";
  rep.priors = cfg.priors;
  if (cfg.model == ModelKind::linear)
    rep.metrics = {"mspe"};
  else
    rep.metrics = {"acc", "spec", "sens", "auc", "f1"};
  rep.setting = {{"model", to_string(cfg.model)},
                 {"n", std::to_string(data.n())},
                 {"p", std::to_string(data.p())},
                 {"folds", std::to_string(cfg.cv_folds)},
                 {"replicates", std::to_string(cfg.replicates)},
                 {"seed", std::to_string(cfg.seed)}};

  const int np = static_cast<int>(cfg.priors.size());
  const int tasks = cfg.replicates * np;
  rep.records.resize(static_cast<size_t>(tasks));
  parallel_for(tasks, cfg.threads, [&](int task) {
    const int r = task / np;
    const PriorKind prior = cfg.priors[static_cast<size_t>(task % np)];
    ReplicateRecord& rec = rep.records[task];
    rec.replicate = r;
    rec.prior = prior;
    try {
      const TargetOptions target = target_for(cfg, prior);
      CvOptions cvo;
      cvo.k = cfg.cv_folds;
      cvo.standardize = cfg.cv_standardize;
      cvo.model = cfg.model;
      // Every prior sees the same folds within a replicate.
      RngStream fold_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r), 1000), 0);
      auto fitter = [&](const Dataset& train, int fold) {
        const FitResult f = fit_model(
            train, target,
            nuts_for(cfg, derive_seed(fit_seed(cfg.seed, r, prior), 3000, static_cast<std::uint64_t>(fold))));
        return FoldFit{cfg.use_median ? f.beta_median : f.beta_mean, f.intercept_mean};
      };
      auto scorer = [&](const Dataset& test, const FoldFit& ff) {
        if (cfg.model == ModelKind::linear) {
          VectorXd m(1);
          m(0) = mspe_observed(test.X, test.y, ff.beta, ff.intercept);
          return m;
        }
        VectorXd eta = test.X * ff.beta;
        eta.array() += ff.intercept;
        const VectorXd prob = eta.unaryExpr([](double e) { return inv_logit(e); });
        const ClassificationMetrics cm = classification_metrics(test.y, prob);
        VectorXd m(5);
        m << cm.acc, value_or_nan(cm.spec), value_or_nan(cm.sens), value_or_nan(cm.auc), value_or_nan(cm.f1);
        return m;
      };
      const CvResult cvr = kfold_cv(data, cvo, fitter, scorer, fold_rng, 1);
      for (size_t m = 0; m < rep.metrics.size(); ++m) {
        // Mean over folds with a defined value.
        double s = 0.0;
        long c = 0;
        for (const auto& v : cvr.per_fold)
          if (!std::isnan(v(static_cast<Index>(m)))) {
            s += v(static_cast<Index>(m));
            ++c;
          }
        rec.metrics[rep.metrics[m]] = c > 0 ? s / static_cast<double>(c) : kNaN;
      }
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
      rec.metrics.clear();
    }
  });
  for (const auto& r : rep.records) rep.failures += r.ok ? 0 : 1;
  check_failures(rep, cfg.max_failure_fraction);
  rep.summarize();
  return rep;
}

void ExperimentReport::summarize() {
  summary.clear();
  int max_rep = -1;
  for (const auto& r : records) max_rep = std::max(max_rep, r.replicate);
  auto lookup = [&](int replicate, PriorKind prior, const std::string& metric) {
    for (const auto& r : records)
      if (r.replicate == replicate && r.prior == prior && r.ok) {
        const auto it = r.metrics.find(metric);
        return it == r.metrics.end() ? kNaN : it->second;
      }
    return kNaN;
  };
  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    if (v.empty()) return;
    double s = 0.0;
    for (double x : v) s += x;
    mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
  };
  for (const auto& metric : metrics) {
    for (PriorKind prior : priors) {
      MetricSummary ms;
      std::vector<double> vals, diffs;
      for (int r = 0; r <= max_rep; ++r) {
        const double x = lookup(r, prior, metric);
        if (!std::isnan(x)) vals.push_back(x);
        if (prior != PriorKind::becca) {
          const double b = lookup(r, PriorKind::becca, metric);
          if (!std::isnan(x) && !std::isnan(b)) diffs.push_back(x - b);
        }
      }
      ms.count = static_cast<long>(vals.size());
      mean_se(vals, ms.mean, ms.se);
      ms.diff_count = static_cast<long>(diffs.size());
      mean_se(diffs, ms.diff_mean, ms.diff_se);
      summary[metric][to_string(prior)] = ms;
    }
  }
}

namespace {

nlohmann::ordered_json num(double x) { return std::isnan(x) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(x); }

}  // namespace

std::string ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : setting) s[k] = v;
  j["setting"] = s;
  j["priors"] = nlohmann::ordered_json::array();
  for (PriorKind p : priors) j["priors"].push_back(to_string(p));
  j["metrics"] = metrics;
  j["failures"] = failures;
  nlohmann::ordered_json summ = nlohmann::ordered_json::array();
  for (const auto& metric : metrics) {
    for (PriorKind prior : priors) {
      const MetricSummary& ms = summary.at(metric).at(to_string(prior));
      nlohmann::ordered_json rec;
      rec["metric"] = metric;
      rec["prior"] = to_string(prior);
      rec["mean"] = num(ms.mean);
      rec["se"] = num(ms.se);
      rec["count"] = ms.count;
      if (prior != PriorKind::becca) {
        rec["minus_becca"] = num(ms.diff_mean);
        rec["minus_becca_se"] = num(ms.diff_se);
        rec["minus_becca_count"] = ms.diff_count;
      }
      summ.push_back(rec);
    }
  }
  j["summary"] = summ;
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json rec;
    rec["replicate"] = r.replicate + 1;
    rec["prior"] = to_string(r.prior);
    rec["ok"] = r.ok;
    if (!r.ok) rec["error"] = r.error;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& metric : metrics) {
      const auto it = r.metrics.find(metric);
      if (it != r.metrics.end()) m[metric] = num(it->second);
    }
    rec["metrics"] = m;
    recs.push_back(rec);
  }
  j["records"] = recs;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::to_csv() const {
  CsvTable t;
  t.header = {"metric"};
  for (PriorKind prior : priors) {
    const std::string name = to_string(prior);
    t.header.push_back(name + "_mean");
    t.header.push_back(name + "_se");
    if (prior != PriorKind::becca) {
      t.header.push_back(name + "_minus_becca");
      t.header.push_back(name + "_minus_becca_se");
    }
  }
  for (const auto& metric : metrics) {
    std::vector<std::string> row{metric};
    for (PriorKind prior : priors) {
      const MetricSummary& ms = summary.at(metric).at(to_string(prior));
      row.push_back(fmt(ms.mean));
      row.push_back(fmt(ms.se));
      if (prior != PriorKind::becca) {
        row.push_back(fmt(ms.diff_mean));
        row.push_back(fmt(ms.diff_se));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return write_csv(t);
}

}  // namespace becca
