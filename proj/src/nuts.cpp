#include "becca/nuts.hpp"

#include <cmath>
#include <sstream>

#include "becca/errors.hpp"
#include "becca/parallel.hpp"

namespace becca {

void NutsConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (draws < 1) fail("draws must be at least 1");
  if (chains < 1) fail("chains must be at least 1");
  if (warmup < 0) fail("warmup must be non-negative");
  if (adapt && warmup < 100) fail("warmup must be at least 100 when adaptation is enabled");
  if (!(target_accept > 0.0 && target_accept < 1.0)) fail("target_accept must lie in (0, 1)");
  if (max_tree_depth < 1) fail("max_tree_depth must be at least 1");
  if (!(init_jitter >= 0.0)) fail("init_jitter must be non-negative");
  if (threads < 0) fail("threads must be non-negative");
  if (!adapt && !(step_size > 0.0)) fail("step_size must be positive");
}

Index DrawMatrix::index_of(const std::string& name) const {
  for (size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return static_cast<Index>(k);
  std::ostringstream msg;
  msg << "unknown parameter '" << name << "'; available:";
  for (const auto& n : names) msg << ' ' << n;
  throw std::out_of_range(msg.str());
}

bool DrawMatrix::has(const std::string& name) const {
  for (const auto& n : names)
    if (n == name) return true;
  return false;
}

MatrixXd DrawMatrix::column(Index k) const {
  MatrixXd out(draws_per_chain(), num_chains());
  for (Index c = 0; c < num_chains(); ++c) out.col(c) = chains[c].values.col(k);
  return out;
}

MatrixXd DrawMatrix::column(const std::string& name) const { return column(index_of(name)); }

MatrixXd DrawMatrix::pooled() const {
  const Index d = draws_per_chain();
  MatrixXd out(d * num_chains(), static_cast<Index>(names.size()));
  for (Index c = 0; c < num_chains(); ++c) out.middleRows(c * d, d) = chains[c].values;
  return out;
}

long DrawMatrix::divergences() const {
  long count = 0;
  for (const auto& ch : chains)
    for (const auto& s : ch.stats) count += s.divergent ? 1 : 0;
  return count;
}

long DrawMatrix::depth_limit_hits() const {
  long count = 0;
  for (const auto& ch : chains)
    for (const auto& s : ch.stats) count += s.tree_depth >= max_tree_depth ? 1 : 0;
  return count;
}

void leapfrog(PhasePoint& point, double eps, const LogDensityModel& target, const VectorXd& inv_mass) {
  point.r += 0.5 * eps * point.grad;
  point.z += eps * inv_mass.cwiseProduct(point.r);
  point.lp = target.log_density_gradient(point.z, point.grad);
  if (point.lp == kRejected || !std::isfinite(point.lp)) {
    point.lp = kRejected;
    return;
  }
  point.r += 0.5 * eps * point.grad;
}

double hamiltonian(const PhasePoint& point, const VectorXd& inv_mass) {
  if (!std::isfinite(point.lp)) return std::numeric_limits<double>::infinity();
  const double h = -point.lp + 0.5 * point.r.dot(inv_mass.cwiseProduct(point.r));
  return std::isnan(h) ? std::numeric_limits<double>::infinity() : h;
}

namespace {

constexpr double kMaxDeltaH = 1000.0;

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

bool no_u_turn(const VectorXd& p_sharp_minus, const VectorXd& p_sharp_plus, const VectorXd& rho) {
  return p_sharp_plus.dot(rho) > 0.0 && p_sharp_minus.dot(rho) > 0.0;
}

// Dual averaging of log step size toward a target acceptance statistic.
class StepSizeAdaptation {
 public:
  explicit StepSizeAdaptation(double delta) : delta_(delta) {}

  void restart(double eps) {
    counter_ = 0;
    s_bar_ = 0.0;
    x_bar_ = 0.0;
    mu_ = std::log(10.0 * eps);
  }

  double learn(double adapt_stat) {
    ++counter_;
    adapt_stat = std::min(1.0, adapt_stat);
    const double n = static_cast<double>(counter_);
    const double eta = 1.0 / (n + kT0);
    s_bar_ = (1.0 - eta) * s_bar_ + eta * (delta_ - adapt_stat);
    const double x = mu_ - s_bar_ * std::sqrt(n) / kGamma;
    const double x_eta = std::pow(n, -kKappa);
    x_bar_ = (1.0 - x_eta) * x_bar_ + x_eta * x;
    return std::exp(x);
  }

  double final_step_size() const { return std::exp(x_bar_); }

 private:
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;
  double delta_;
  long counter_ = 0;
  double s_bar_ = 0.0;
  double x_bar_ = 0.0;
  double mu_ = 0.0;
};

// Warmup schedule: initial fast window, doubling slow windows that
// estimate the diagonal metric, terminal fast window.
class MetricAdaptation {
 public:
  MetricAdaptation(int num_warmup, Index dim) : num_warmup_(num_warmup), dim_(dim) {
    init_buffer_ = static_cast<int>(0.15 * num_warmup);
    term_buffer_ = static_cast<int>(0.1 * num_warmup);
    base_window_ = std::min(25, num_warmup - init_buffer_ - term_buffer_);
    window_size_ = base_window_;
    next_window_ = init_buffer_ + window_size_ - 1;
    reset_estimator();
  }

  // Returns true when a new metric was produced.
  bool learn(const VectorXd& z, VectorXd& inv_metric) {
    if (in_window()) add_sample(z);
    if (end_of_window()) {
      compute_next_window();
      const double n = static_cast<double>(count_);
      VectorXd var = m2_ / (n - 1.0);
      inv_metric = (n / (n + 5.0)) * var.array() + 1e-3 * (5.0 / (n + 5.0));
      reset_estimator();
      ++counter_;
      return true;
    }
    ++counter_;
    return false;
  }

 private:
  bool in_window() const {
    return counter_ >= init_buffer_ && counter_ < num_warmup_ - term_buffer_ && counter_ != num_warmup_;
  }
  bool end_of_window() const { return counter_ == next_window_ && counter_ != num_warmup_; }

  void compute_next_window() {
    const int last = num_warmup_ - term_buffer_ - 1;
    if (next_window_ == last) return;
    window_size_ *= 2;
    next_window_ = counter_ + window_size_;
    if (next_window_ != last) {
      const int boundary = next_window_ + 2 * window_size_;
      if (boundary >= num_warmup_ - term_buffer_) next_window_ = last;
    }
  }

  void reset_estimator() {
    count_ = 0;
    mean_ = VectorXd::Zero(dim_);
    m2_ = VectorXd::Zero(dim_);
  }

  void add_sample(const VectorXd& z) {
    ++count_;
    const VectorXd delta = z - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(z - mean_);
  }

  int num_warmup_;
  Index dim_;
  int init_buffer_ = 0;
  int term_buffer_ = 0;
  int base_window_ = 0;
  int window_size_ = 0;
  int next_window_ = 0;
  int counter_ = 0;
  long count_ = 0;
  VectorXd mean_;
  VectorXd m2_;
};

class NutsChain {
 public:
  NutsChain(const LogDensityModel& target, const NutsConfig& config, int chain)
      : target_(target), config_(config), chain_(chain), rng_(config.seed, static_cast<std::uint64_t>(chain)) {
    const Index d = target.dimension();
    inv_mass_ = VectorXd::Ones(d);
    eps_ = config.adapt ? 1.0 : config.step_size;
  }

  ChainDraws run() {
    initialize();
    StepSizeAdaptation stepsize(config_.target_accept);
    const bool adapting = config_.adapt && config_.warmup > 0;
    std::optional<MetricAdaptation> metric;
    if (adapting) {
      init_stepsize();
      stepsize.restart(eps_);
      metric.emplace(config_.warmup, target_.dimension());
    }
    for (int it = 0; it < config_.warmup; ++it) {
      const DrawStats s = transition();
      if (!adapting) continue;
      eps_ = stepsize.learn(s.accept_stat);
      if (metric->learn(current_.z, inv_mass_)) {
        init_stepsize();
        stepsize.restart(eps_);
      }
    }
    if (adapting) eps_ = stepsize.final_step_size();

    ChainDraws out;
    const auto names = target_.parameter_names();
    out.values.resize(config_.draws, static_cast<Index>(names.size()));
    out.stats.reserve(config_.draws);
    for (int it = 0; it < config_.draws; ++it) {
      out.stats.push_back(transition());
      out.values.row(it) = target_.constrain(current_.z).transpose();
    }
    out.step_size = eps_;
    out.inv_metric = inv_mass_;
    return out;
  }

 private:
  void initialize() {
    const Index d = target_.dimension();
    current_.grad.resize(d);
    if (config_.init) {
      current_.z = *config_.init;
      current_.lp = target_.log_density_gradient(current_.z, current_.grad);
      if (std::isfinite(current_.lp)) return;
      throw SamplerError("chain " + std::to_string(chain_) + ": supplied initial point is outside the support");
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
      current_.z.resize(d);
      for (Index i = 0; i < d; ++i) current_.z(i) = rng_.uniform(-config_.init_jitter, config_.init_jitter);
      current_.lp = target_.log_density_gradient(current_.z, current_.grad);
      if (std::isfinite(current_.lp) && current_.grad.allFinite()) return;
    }
    throw SamplerError("chain " + std::to_string(chain_) + ": no finite initial point after 100 attempts");
  }

  void sample_momentum(PhasePoint& point) {
    point.r.resize(point.z.size());
    for (Index i = 0; i < point.r.size(); ++i) point.r(i) = rng_.normal() / std::sqrt(inv_mass_(i));
  }

  VectorXd p_sharp(const PhasePoint& point) const { return inv_mass_.cwiseProduct(point.r); }

  // Doubles or halves the step size until one leapfrog step's acceptance
  // probability crosses 0.8.
  void init_stepsize() {
    const PhasePoint start = current_;
    PhasePoint point = start;
    sample_momentum(point);
    double h0 = hamiltonian(point, inv_mass_);
    leapfrog(point, eps_, target_, inv_mass_);
    double delta_h = h0 - hamiltonian(point, inv_mass_);
    const int direction = delta_h > std::log(0.8) ? 1 : -1;
    for (;;) {
      point = start;
      sample_momentum(point);
      h0 = hamiltonian(point, inv_mass_);
      leapfrog(point, eps_, target_, inv_mass_);
      delta_h = h0 - hamiltonian(point, inv_mass_);
      if (direction == 1 && !(delta_h > std::log(0.8))) break;
      if (direction == -1 && !(delta_h < std::log(0.8))) break;
      eps_ = direction == 1 ? 2.0 * eps_ : 0.5 * eps_;
      if (eps_ > 1e7)
        throw SamplerError("chain " + std::to_string(chain_) + ": step size diverged; posterior may be improper");
      if (eps_ == 0.0) throw SamplerError("chain " + std::to_string(chain_) + ": step size collapsed to zero");
    }
  }

  struct TreeState {
    double h0 = 0.0;
    int n_leapfrog = 0;
    double sum_metro_prob = 0.0;
    bool divergent = false;
  };

  bool build_tree(int depth, PhasePoint& z, PhasePoint& z_propose, VectorXd& p_sharp_beg, VectorXd& p_sharp_end,
                  VectorXd& rho, VectorXd& p_beg, VectorXd& p_end, double sign, TreeState& ts,
                  double& log_sum_weight) {
    if (depth == 0) {
      leapfrog(z, sign * eps_, target_, inv_mass_);
      ++ts.n_leapfrog;
      const double h = hamiltonian(z, inv_mass_);
      if (h - ts.h0 > kMaxDeltaH) ts.divergent = true;
      log_sum_weight = log_sum_exp(log_sum_weight, ts.h0 - h);
      ts.sum_metro_prob += (ts.h0 - h > 0.0) ? 1.0 : std::exp(ts.h0 - h);
      z_propose = z;
      p_sharp_beg = p_sharp(z);
      p_sharp_end = p_sharp_beg;
      rho += z.r;
      p_beg = z.r;
      p_end = p_beg;
      return !ts.divergent;
    }
    const Index d = z.z.size();
    const double neg_inf = -std::numeric_limits<double>::infinity();

    double log_sum_weight_init = neg_inf;
    VectorXd p_init_end(d), p_sharp_init_end(d), rho_init = VectorXd::Zero(d);
    if (!build_tree(depth - 1, z, z_propose, p_sharp_beg, p_sharp_init_end, rho_init, p_beg, p_init_end, sign, ts,
                    log_sum_weight_init))
      return false;

    PhasePoint z_propose_final = z;
    double log_sum_weight_final = neg_inf;
    VectorXd p_final_beg(d), p_sharp_final_beg(d), rho_final = VectorXd::Zero(d);
    if (!build_tree(depth - 1, z, z_propose_final, p_sharp_final_beg, p_sharp_end, rho_final, p_final_beg, p_end,
                    sign, ts, log_sum_weight_final))
      return false;

    const double log_sum_weight_subtree = log_sum_exp(log_sum_weight_init, log_sum_weight_final);
    log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);
    if (log_sum_weight_final > log_sum_weight_subtree) {
      z_propose = z_propose_final;
    } else if (rng_.uniform() < std::exp(log_sum_weight_final - log_sum_weight_subtree)) {
      z_propose = z_propose_final;
    }

    const VectorXd rho_subtree = rho_init + rho_final;
    rho += rho_subtree;
    bool persist = no_u_turn(p_sharp_beg, p_sharp_end, rho_subtree);
    persist = persist && no_u_turn(p_sharp_beg, p_sharp_final_beg, rho_init + p_final_beg);
    persist = persist && no_u_turn(p_sharp_init_end, p_sharp_end, rho_final + p_init_end);
    return persist;
  }

  DrawStats transition() {
    sample_momentum(current_);
    PhasePoint z_fwd = current_;
    PhasePoint z_bck = current_;
    PhasePoint z_sample = current_;
    PhasePoint z_propose = current_;

    VectorXd p_fwd_fwd = current_.r, p_fwd_bck = current_.r, p_bck_fwd = current_.r, p_bck_bck = current_.r;
    const VectorXd ps = p_sharp(current_);
    VectorXd p_sharp_fwd_fwd = ps, p_sharp_fwd_bck = ps, p_sharp_bck_fwd = ps, p_sharp_bck_bck = ps;
    VectorXd rho = current_.r;

    TreeState ts;
    ts.h0 = hamiltonian(current_, inv_mass_);
    double log_sum_weight = 0.0;
    int depth = 0;
    const Index d = current_.z.size();

    while (depth < config_.max_tree_depth) {
      VectorXd rho_fwd = VectorXd::Zero(d);
      VectorXd rho_bck = VectorXd::Zero(d);
      bool valid = false;
      double log_sum_weight_subtree = -std::numeric_limits<double>::infinity();
      if (rng_.uniform() > 0.5) {
        PhasePoint z = z_fwd;
        rho_bck = rho;
        p_bck_fwd = p_fwd_bck;
        p_sharp_bck_fwd = p_sharp_fwd_bck;
        valid = build_tree(depth, z, z_propose, p_sharp_fwd_bck, p_sharp_fwd_fwd, rho_fwd, p_fwd_bck, p_fwd_fwd, 1.0,
                           ts, log_sum_weight_subtree);
        z_fwd = std::move(z);
      } else {
        PhasePoint z = z_bck;
        rho_fwd = rho;
        p_fwd_bck = p_bck_fwd;
        p_sharp_fwd_bck = p_sharp_bck_fwd;
        valid = build_tree(depth, z, z_propose, p_sharp_bck_fwd, p_sharp_bck_bck, rho_bck, p_bck_fwd, p_bck_bck,
                           -1.0, ts, log_sum_weight_subtree);
        z_bck = std::move(z);
      }
      if (!valid) break;
      ++depth;
      if (log_sum_weight_subtree > log_sum_weight) {
        z_sample = z_propose;
      } else if (rng_.uniform() < std::exp(log_sum_weight_subtree - log_sum_weight)) {
        z_sample = z_propose;
      }
      log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);

      rho = rho_bck + rho_fwd;
      bool persist = no_u_turn(p_sharp_bck_bck, p_sharp_fwd_fwd, rho);
      persist = persist && no_u_turn(p_sharp_bck_bck, p_sharp_fwd_bck, rho_bck + p_fwd_bck);
      persist = persist && no_u_turn(p_sharp_bck_fwd, p_sharp_fwd_fwd, rho_fwd + p_bck_fwd);
      if (!persist) break;
    }

    current_ = std::move(z_sample);
    DrawStats s;
    s.accept_stat = ts.n_leapfrog > 0 ? ts.sum_metro_prob / ts.n_leapfrog : 0.0;
    s.tree_depth = depth;
    s.n_leapfrog = ts.n_leapfrog;
    s.divergent = ts.divergent;
    s.energy = hamiltonian(current_, inv_mass_);
    s.step_size = eps_;
    return s;
  }

  const LogDensityModel& target_;
  const NutsConfig& config_;
  int chain_;
  RngStream rng_;
  VectorXd inv_mass_;
  double eps_;
  PhasePoint current_;
};

}  // namespace

ChainDraws nuts_chain(const LogDensityModel& target, const NutsConfig& config, int chain) {
  config.validate();
  NutsChain runner(target, config, chain);
  return runner.run();
}

namespace {

void add_warnings(DrawMatrix& dm) {
  for (Index c = 0; c < dm.num_chains(); ++c) {
    const auto& stats = dm.chains[c].stats;
    long div = 0;
    for (const auto& s : stats) div += s.divergent ? 1 : 0;
    if (!stats.empty() && static_cast<double>(div) > 0.2 * static_cast<double>(stats.size())) {
      std::ostringstream msg;
      msg << "chain " << c << ": " << div << " of " << stats.size() << " post-warmup transitions diverged";
      dm.warnings.push_back(msg.str());
    }
  }
}

}  // namespace

DrawMatrix nuts_sample(const LogDensityModel& target, const NutsConfig& config) {
  DrawMatrix dm;
  dm.names = target.parameter_names();
  dm.max_tree_depth = config.max_tree_depth;
  dm.chains.push_back(nuts_chain(target, config, 0));
  add_warnings(dm);
  return dm;
}

DrawMatrix run_chains(const LogDensityModel& target, const NutsConfig& config) {
  config.validate();
  DrawMatrix dm;
  dm.names = target.parameter_names();
  dm.max_tree_depth = config.max_tree_depth;
  dm.chains.resize(static_cast<size_t>(config.chains));
  parallel_for(config.chains, config.threads, [&](int c) { dm.chains[c] = nuts_chain(target, config, c); });
  add_warnings(dm);
  return dm;
}

}  // namespace becca
