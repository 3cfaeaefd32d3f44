#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "becca/cli.hpp"
#include "becca/csv.hpp"
#include "becca/errors.hpp"
#include "becca/marginals.hpp"

namespace becca {

namespace fs = std::filesystem;

ModelKind resolved_model(const RunConfig& cfg) { return parse_model(cfg.model); }

std::vector<PriorKind> resolved_priors(const RunConfig& cfg) {
  std::vector<PriorKind> out;
  for (const auto& name : cfg.priors) {
    const PriorKind k = parse_prior(name);
    if (std::find(out.begin(), out.end(), k) != out.end()) throw ConfigError("prior '" + name + "' listed twice");
    out.push_back(k);
  }
  if (out.empty()) throw ConfigError("at least one prior is required");
  return out;
}

NutsConfig resolved_nuts(const RunConfig& cfg) {
  NutsConfig n;
  n.warmup = cfg.warmup;
  n.draws = cfg.draws;
  n.chains = cfg.chains;
  n.target_accept = cfg.target_accept;
  n.max_tree_depth = cfg.max_depth;
  n.seed = cfg.seed;
  n.init_jitter = cfg.init_jitter;
  n.threads = cfg.threads;
  n.validate();
  return n;
}

SimSpec resolved_sim(const RunConfig& cfg) {
  const ModelKind model = resolved_model(cfg);
  if (cfg.p < 1) throw ConfigError("p must be at least 1");
  SimSpec s = default_sim_spec(model, cfg.n, cfg.p, cfg.q);
  std::string cov = cfg.covariance;
  if (cov == "auto") cov = model == ModelKind::linear ? "equicorrelated" : "autoregressive";
  const double rho = cfg.rho >= 0.0 ? cfg.rho : (model == ModelKind::linear ? 0.75 : 0.65);
  if (cov == "identity")
    s.covariance = CovarianceSpec::identity(cfg.p);
  else if (cov == "equicorrelated")
    s.covariance = CovarianceSpec::equicorrelated(cfg.p, rho);
  else if (cov == "autoregressive")
    s.covariance = CovarianceSpec::autoregressive(cfg.p, rho);
  else
    throw ConfigError("covariance must be auto, identity, equicorrelated or autoregressive");
  if (cfg.law != "auto") s.law = parse_coefficient_law(cfg.law);
  s.g = cfg.g;
  s.sigma2 = cfg.sigma2;
  s.lo = cfg.lo;
  s.hi = cfg.hi;
  s.value = cfg.value;
  s.permute = cfg.permute;
  s.seed = cfg.seed;
  s.validate();
  return s;
}

namespace {

bool tri_state(const std::string& value, bool automatic, const char* field) {
  if (value == "auto") return automatic;
  if (value == "on" || value == "true") return true;
  if (value == "off" || value == "false") return false;
  throw ConfigError(std::string(field) + " must be auto, on or off");
}

}  // namespace

ExperimentConfig resolved_experiment(const RunConfig& cfg) {
  ExperimentConfig e;
  e.priors = resolved_priors(cfg);
  e.model = resolved_model(cfg);
  e.param = parse_parameterization(cfg.param);
  if (!(cfg.ig_a > 0.0 && cfg.ig_b > 0.0)) throw ConfigError("ig-a and ig-b must be positive");
  e.ig = {cfg.ig_a, cfg.ig_b};
  if (cfg.a_dl < 0.0) throw ConfigError("a-dl must be non-negative (0 means 1/p)");
  e.a_dl = cfg.a_dl;
  const bool is_cv = cfg.command == "cv";
  e.intercept = tri_state(cfg.intercept, is_cv && e.model == ModelKind::logistic, "intercept");
  e.nuts = resolved_nuts(cfg);
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  e.replicates = cfg.replicates;
  e.cv = cfg.cv;
  if (cfg.folds < 2) throw ConfigError("folds must be at least 2");
  e.cv_folds = cfg.folds;
  e.cv_standardize = tri_state(cfg.standardize, is_cv, "standardize");
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
  e.threshold = cfg.threshold;
  e.use_median = cfg.use_median;
  if (cfg.threads < 0) throw ConfigError("threads must be non-negative");
  e.threads = cfg.threads;
  e.seed = cfg.seed;
  return e;
}

namespace {

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.out) / name; }

void write_out(const fs::path& path, const std::string& contents) { write_file_atomic(path.string(), contents); }

Dataset load_or_simulate(const RunConfig& cfg, ModelKind model) {
  if (cfg.data.empty()) return generate(resolved_sim(cfg), 0);
  Dataset d = read_dataset_csv(read_file(cfg.data), cfg.response, model);
  if (!cfg.truth.empty()) read_truth_csv(read_file(cfg.truth), d);
  return d;
}

TargetOptions target_options(const ExperimentConfig& e, PriorKind prior) {
  TargetOptions t;
  t.model = e.model;
  t.prior = prior;
  t.param = e.param;
  t.ig = e.ig;
  t.a_dl = e.a_dl;
  t.intercept = e.intercept;
  return t;
}

std::string sampler_csv(const DrawMatrix& dm) {
  CsvTable t;
  t.header = {"chain", "iteration", "accept_stat", "tree_depth", "n_leapfrog", "divergent", "energy", "step_size"};
  for (Index c = 0; c < dm.num_chains(); ++c) {
    const auto& stats = dm.chains[c].stats;
    for (size_t it = 0; it < stats.size(); ++it) {
      const auto& s = stats[it];
      t.rows.push_back({std::to_string(c + 1), std::to_string(it + 1), format_double(s.accept_stat),
                        std::to_string(s.tree_depth), std::to_string(s.n_leapfrog), s.divergent ? "1" : "0",
                        format_double(s.energy), format_double(s.step_size)});
    }
  }
  return write_csv(t);
}

std::string selection_csv(const SelectionResult& sel) {
  CsvTable t;
  t.header = {"j", "criterion", "indicator"};
  for (Index j = 0; j < sel.criterion.size(); ++j)
    t.rows.push_back({std::to_string(j + 1), format_double(sel.criterion(j)), std::to_string(sel.indicator(j))});
  return write_csv(t);
}

void write_selection(const RunConfig& cfg, const fs::path& dir, const DrawMatrix& draws, PriorKind prior,
                     double threshold, std::uint64_t seed) {
  const SelectionResult sel = select(draws, prior, threshold);
  write_out(dir / "selection.csv", selection_csv(sel));
  RngStream rng(derive_seed(seed, 0, 2000 + static_cast<std::uint64_t>(prior)), 0);
  const ModelPosterior mp = model_posterior(draws, prior, rng);
  if (cfg.top_k < 1) throw ConfigError("top-k must be at least 1");
  write_out(dir / "heatmap.csv", heatmap_csv(top_k_models(mp, cfg.top_k), mp.p));
}

}  // namespace

std::string draws_csv(const DrawMatrix& draws) {
  CsvTable t;
  t.header = {"chain", "iteration"};
  t.header.insert(t.header.end(), draws.names.begin(), draws.names.end());
  for (Index c = 0; c < draws.num_chains(); ++c) {
    const MatrixXd& v = draws.chains[c].values;
    for (Index it = 0; it < v.rows(); ++it) {
      std::vector<std::string> row{std::to_string(c + 1), std::to_string(it + 1)};
      for (Index k = 0; k < v.cols(); ++k) row.push_back(format_double(v(it, k)));
      t.rows.push_back(std::move(row));
    }
  }
  return write_csv(t);
}

DrawMatrix read_draws_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  if (t.header.size() < 3 || t.header[0] != "chain" || t.header[1] != "iteration")
    throw DataError("draw file must start with chain,iteration columns");
  const MatrixXd m = numeric_columns(t);
  DrawMatrix dm;
  dm.names.assign(t.header.begin() + 2, t.header.end());
  int max_chain = 0;
  for (Index r = 0; r < m.rows(); ++r) max_chain = std::max(max_chain, static_cast<int>(m(r, 0)));
  std::vector<std::vector<Index>> rows(static_cast<size_t>(max_chain));
  for (Index r = 0; r < m.rows(); ++r) {
    const int c = static_cast<int>(m(r, 0));
    if (c < 1) throw DataError("draw file: chain numbers start at 1 (row " + std::to_string(r + 1) + ")");
    rows[c - 1].push_back(r);
  }
  for (const auto& rs : rows) {
    if (rs.size() != rows.front().size()) throw DataError("draw file: chains have different lengths");
    ChainDraws ch;
    ch.values.resize(static_cast<Index>(rs.size()), static_cast<Index>(dm.names.size()));
    for (size_t i = 0; i < rs.size(); ++i) ch.values.row(static_cast<Index>(i)) = m.row(rs[i]).tail(dm.names.size());
    dm.chains.push_back(std::move(ch));
  }
  return dm;
}

void cmd_simulate(const RunConfig& cfg, const std::string& resolved_config) {
  const SimSpec spec = resolved_sim(cfg);
  const Dataset d = generate(spec, 0);
  write_out(out_path(cfg, "data.csv"), dataset_csv(d));
  write_out(out_path(cfg, "truth.csv"), truth_csv(d));
  write_out(out_path(cfg, "manifest.toml"), resolved_config);
  std::cout << "simulated " << d.n() << " x " << d.p() << " " << to_string(spec.model) << " data into " << cfg.out
            << "\n";
}

void cmd_fit(const RunConfig& cfg, const std::string& resolved_config) {
  const ExperimentConfig e = resolved_experiment(cfg);
  if (cfg.select)
    for (PriorKind k : e.priors)
      if (k == PriorKind::dl) throw ConfigError("selection is not supported for the Dirichlet-Laplace prior");
  Dataset data = load_or_simulate(cfg, e.model);
  if (e.cv_standardize) data = standardize(data, e.model);
  write_out(out_path(cfg, "config.toml"), resolved_config);
  for (PriorKind prior : e.priors) {
    NutsConfig nuts = e.nuts;
    nuts.seed = fit_seed(cfg.seed, 0, prior);
    const FitResult fit = fit_model(data, target_options(e, prior), nuts);
    const fs::path dir = fs::path(cfg.out) / to_string(prior);
    write_out(dir / "draws.csv", draws_csv(fit.draws));
    write_out(dir / "sampler.csv", sampler_csv(fit.draws));
    write_out(dir / "diagnostics.txt", fit.diagnostics.to_text());
    if (!cfg.trace.empty()) export_trace(fit.draws, cfg.trace, (dir / "trace.csv").string());
    if (cfg.select) write_selection(cfg, dir, fit.draws, prior, e.threshold, cfg.seed);
    const double max_rhat = fit.diagnostics.max_rhat("beta[");
    std::cout << "prior=" << to_string(prior) << " max_rhat=" << max_rhat
              << " min_ess=" << fit.diagnostics.min_ess() << " divergences=" << fit.diagnostics.divergences << "\n";
    if (max_rhat > 1.05)
      std::cerr << "warning: " << to_string(prior) << " has a coefficient with R-hat " << max_rhat << " > 1.05\n";
    for (const auto& w : fit.draws.warnings) std::cerr << "warning: " << w << "\n";
  }
}

void cmd_replicate(const RunConfig& cfg, const std::string& resolved_config) {
  const ExperimentConfig e = resolved_experiment(cfg);
  const SimSpec sim = resolved_sim(cfg);
  write_out(out_path(cfg, "config.toml"), resolved_config);
  const ExperimentReport rep = run_replicates(sim, e);
  write_out(out_path(cfg, "report.json"), rep.to_json());
  write_out(out_path(cfg, "table.csv"), rep.to_csv());
  for (const auto& r : rep.records)
    if (!r.ok) std::cerr << "warning: replicate " << r.replicate + 1 << " (" << to_string(r.prior) << ") failed: " << r.error << "\n";
  std::cout << "replicate report written to " << cfg.out << "\n";
}

void cmd_cv(const RunConfig& cfg, const std::string& resolved_config) {
  const ExperimentConfig e = resolved_experiment(cfg);
  if (cfg.data.empty()) throw ConfigError("cv needs --data");
  const Dataset data = read_dataset_csv(read_file(cfg.data), cfg.response, e.model);
  write_out(out_path(cfg, "config.toml"), resolved_config);
  ExperimentConfig one = e;
  if (cfg.replicates == 50) one.replicates = 1;  // the replicate default is meant for simulations
  const ExperimentReport rep = run_cv(data, one);
  write_out(out_path(cfg, "report.json"), rep.to_json());
  write_out(out_path(cfg, "table.csv"), rep.to_csv());
  std::cout << "cv report written to " << cfg.out << "\n";
}

void cmd_select(const RunConfig& cfg, const std::string& resolved_config) {
  const ExperimentConfig e = resolved_experiment(cfg);
  for (PriorKind k : e.priors)
    if (k == PriorKind::dl) throw ConfigError("selection is not supported for the Dirichlet-Laplace prior");
  write_out(out_path(cfg, "config.toml"), resolved_config);
  if (!cfg.draws_file.empty()) {
    if (e.priors.size() != 1) throw ConfigError("select with --draws-file takes exactly one --prior");
    const DrawMatrix dm = read_draws_csv(read_file(cfg.draws_file));
    write_selection(cfg, fs::path(cfg.out), dm, e.priors.front(), e.threshold, cfg.seed);
    return;
  }
  Dataset data = load_or_simulate(cfg, e.model);
  if (e.cv_standardize) data = standardize(data, e.model);
  for (PriorKind prior : e.priors) {
    NutsConfig nuts = e.nuts;
    nuts.seed = fit_seed(cfg.seed, 0, prior);
    const FitResult fit = fit_model(data, target_options(e, prior), nuts);
    const fs::path dir = fs::path(cfg.out) / to_string(prior);
    write_out(dir / "draws.csv", draws_csv(fit.draws));
    write_selection(cfg, dir, fit.draws, prior, e.threshold, cfg.seed);
  }
}

void cmd_marginal(const RunConfig& cfg, const std::string& resolved_config) {
  if (cfg.gamma_points < 1 || cfg.beta_points < 2 || cfg.logit_points < 2)
    throw ConfigError("grid sizes must be positive (beta and logit grids need two points)");
  if (!(cfg.beta_max > 0.0) || !(cfg.logit_max > 0.0)) throw ConfigError("grid limits must be positive");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  write_out(out_path(cfg, "config.toml"), resolved_config);

  auto row = [](CsvTable& t, double x, const std::string& prior, auto&& density) {
    std::string value;
    std::string status = "ok";
    try {
      value = format_double(density());
    } catch (const IntegrationError& e) {
      value = format_double(e.best_estimate());
      status = e.what();
    }
    t.rows.push_back({format_double(x), value, prior, status});
  };
  const std::vector<std::string> header{"x", "density", "prior", "status"};

  CsvTable gamma{header, {}};
  for (int i = 1; i <= cfg.gamma_points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(cfg.gamma_points + 1);
    row(gamma, x, "becca", [&] { return becca_marginal_gamma_density(x, cfg.tol); });
  }
  for (int i = 1; i <= cfg.gamma_points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(cfg.gamma_points + 1);
    row(gamma, x, "beta(0.5,0.5)", [&] { return 1.0 / (std::numbers::pi * std::sqrt(x * (1.0 - x))); });
  }
  write_out(out_path(cfg, "marginal_gamma.csv"), write_csv(gamma));

  // The same curves as densities of logit(gamma); their mass sits far
  // into the tails, which a grid on (0, 1) cannot resolve.
  CsvTable logit{header, {}};
  for (int i = 0; i < cfg.logit_points; ++i) {
    const double t = -cfg.logit_max + 2.0 * cfg.logit_max * i / (cfg.logit_points - 1);
    row(logit, t, "becca", [&] { return becca_logit_gamma_density(t); });
  }
  for (int i = 0; i < cfg.logit_points; ++i) {
    const double t = -cfg.logit_max + 2.0 * cfg.logit_max * i / (cfg.logit_points - 1);
    row(logit, t, "beta(0.5,0.5)",
        [&] { return std::exp(0.5 * log_inv_logit(t) + 0.5 * log1m_inv_logit(t)) / std::numbers::pi; });
  }
  write_out(out_path(cfg, "marginal_logit_gamma.csv"), write_csv(logit));

  CsvTable beta{header, {}};
  const int m = cfg.beta_points;
  auto beta_x = [&](int i) {
    // Odd multiples of a half step: symmetric and never exactly zero.
    return cfg.beta_max * static_cast<double>(2 * i - m + 1) / static_cast<double>(m - 1);
  };
  for (int i = 0; i < m; ++i) {
    const double x = beta_x(i);
    row(beta, x, "becca", [&] { return becca_marginal_beta_density(x, cfg.tol); });
  }
  for (int i = 0; i < m; ++i) {
    const double x = beta_x(i);
    row(beta, x, "hs", [&] { return hs_marginal_beta_density(x, cfg.tol); });
  }
  for (int i = 0; i < m; ++i) {
    const double x = beta_x(i);
    row(beta, x, "hsplus", [&] { return hsplus_marginal_beta_density(x, cfg.tol); });
  }
  write_out(out_path(cfg, "marginal_beta.csv"), write_csv(beta));
  std::cout << "marginal curves written to " << cfg.out << "\n";
}

namespace {

std::string env_name(const std::string& long_name) {
  std::string out = "BECCA_";
  for (char c : long_name) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--seed", c.seed, "master seed")->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads (0 = all)")->capture_default_str();
  app.add_option("--model", c.model, "linear or logistic")->capture_default_str();
  app.add_option("--prior", c.priors, "becca, hs, hsplus or dl (repeatable)")->delimiter(',');

  app.add_option("--chains", c.chains, "chains per fit")->capture_default_str();
  app.add_option("--warmup", c.warmup, "warmup iterations")->capture_default_str();
  app.add_option("--draws", c.draws, "post-warmup draws per chain")->capture_default_str();
  app.add_option("--target-accept", c.target_accept, "step-size adaptation target")->capture_default_str();
  app.add_option("--max-depth", c.max_depth, "maximum tree depth")->capture_default_str();
  app.add_option("--init-jitter", c.init_jitter, "initialization radius")->capture_default_str();
  app.add_option("--param", c.param, "centered, noncentered or auto")->capture_default_str();

  app.add_option("--ig-a", c.ig_a, "inverse-gamma shape for sigma2")->capture_default_str();
  app.add_option("--ig-b", c.ig_b, "inverse-gamma scale for sigma2")->capture_default_str();
  app.add_option("--a-dl", c.a_dl, "Dirichlet-Laplace concentration (0 = 1/p)")->capture_default_str();
  app.add_option("--intercept", c.intercept, "auto, on or off")->capture_default_str();

  app.add_option("--n", c.n, "observations")->capture_default_str();
  app.add_option("--p", c.p, "predictors")->capture_default_str();
  app.add_option("--q", c.q, "active predictors")->capture_default_str();
  app.add_option("--covariance", c.covariance, "auto, identity, equicorrelated or autoregressive")
      ->capture_default_str();
  app.add_option("--rho", c.rho, "covariance parameter (negative = model default)")->capture_default_str();
  app.add_option("--law", c.law, "auto, normal_scaled, uniform or fixed")->capture_default_str();
  app.add_option("--g", c.g, "variance multiplier of normal_scaled (0 = n)")->capture_default_str();
  app.add_option("--sigma2", c.sigma2, "noise variance")->capture_default_str();
  app.add_option("--lo", c.lo, "uniform law lower bound")->capture_default_str();
  app.add_option("--hi", c.hi, "uniform law upper bound")->capture_default_str();
  app.add_option("--value", c.value, "fixed law value")->capture_default_str();
  app.add_option("--permute", c.permute, "randomize active positions")->capture_default_str();

  app.add_option("--replicates", c.replicates, "simulated replicates")->capture_default_str();
  app.add_option("--cv", c.cv, "add cross-validated MSPE to replicates")->capture_default_str();
  app.add_option("--folds", c.folds, "cross-validation folds")->capture_default_str();
  app.add_option("--standardize", c.standardize, "auto, on or off")->capture_default_str();
  app.add_option("--threshold", c.threshold, "selection threshold")->capture_default_str();
  app.add_option("--top-k", c.top_k, "models in the heatmap")->capture_default_str();
  app.add_option("--use-median", c.use_median, "posterior median instead of mean")->capture_default_str();
  app.add_option("--select", c.select, "write selection files from fit")->capture_default_str();

  app.add_option("--data", c.data, "data CSV")->capture_default_str();
  app.add_option("--truth", c.truth, "truth sidecar CSV")->capture_default_str();
  app.add_option("--response", c.response, "response column")->capture_default_str();
  app.add_option("--draws-file", c.draws_file, "draw CSV from fit")->capture_default_str();
  app.add_option("--trace", c.trace, "parameters for trace export")->delimiter(',');

  app.add_option("--gamma-points", c.gamma_points, "gamma grid size")->capture_default_str();
  app.add_option("--beta-max", c.beta_max, "beta grid half-width")->capture_default_str();
  app.add_option("--beta-points", c.beta_points, "beta grid size")->capture_default_str();
  app.add_option("--logit-max", c.logit_max, "logit grid half-width")->capture_default_str();
  app.add_option("--logit-points", c.logit_points, "logit grid size")->capture_default_str();
  app.add_option("--tol", c.tol, "quadrature tolerance")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Bayesian sparse regression with Beta Cauchy-Cauchy, horseshoe and Dirichlet-Laplace priors", "becca"};
  app.set_config("--config", "", "TOML config file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  add_options(app, cfg);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "generate a simulated dataset"},
      {"fit", "run NUTS on a dataset"},
      {"replicate", "simulation study over replicates"},
      {"cv", "k-fold cross-validation on a dataset"},
      {"select", "variable selection and model heatmap"},
      {"marginal", "marginal prior density curves"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  app.require_subcommand(1);

  // Environment variables sit between the config file and the command line.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    const char* env = std::getenv(env_name(name).c_str());
    if (env == nullptr) continue;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == "--" + name || a.rfind("--" + name + "=", 0) == 0;
    });
    if (!given) args.push_back("--" + name + "=" + env);
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.priors.empty()) {
    if (cfg.command == "replicate" || cfg.command == "cv")
      cfg.priors = {"becca", "hs", "hsplus", "dl"};
    else
      cfg.priors = {"becca"};
    for (const auto& p : cfg.priors) app.get_option("--prior")->add_result(p);
  }

  try {
    // Validate everything the command will read before doing any work.
    resolved_experiment(cfg);
    if (cfg.command == "simulate" || cfg.command == "replicate" || (cfg.data.empty() && cfg.command != "marginal" &&
                                                                    cfg.command != "cv" && cfg.draws_file.empty()))
      resolved_sim(cfg);
    const std::string resolved = "# becca " + cfg.command + "\n" + app.config_to_str(true, false);
    if (cfg.command == "simulate") cmd_simulate(cfg, resolved);
    else if (cfg.command == "fit") cmd_fit(cfg, resolved);
    else if (cfg.command == "replicate") cmd_replicate(cfg, resolved);
    else if (cfg.command == "cv") cmd_cv(cfg, resolved);
    else if (cfg.command == "select") cmd_select(cfg, resolved);
    else cmd_marginal(cfg, resolved);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const SamplerError& e) {
    std::cerr << "sampler error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace becca
