#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "smcmc/errors.hpp"
#include "smcmc/posterior.hpp"
#include "smcmc/rng.hpp"

namespace smcmc {

struct NutsConfig {
  int n_adapt = 0;
  double target_accept = 0.8;
  int max_tree_depth = 10;
  /// Learn a diagonal mass matrix from warmup draws (expanding windows).
  /// With false the identity metric is kept throughout.
  bool adapt_mass = true;
  /// 0 selects the doubling heuristic at the initial point.
  double initial_step = 0.0;
  /// A leapfrog state whose energy exceeds the initial energy by more than
  /// this is a divergence; the whole transition is then rejected.
  double divergence_threshold = 1000.0;
};

/// Position/momentum pair with the cached gradient and log density at q.
struct HmcPoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  Eigen::VectorXd grad;
  double value = 0.0;
};

/// One leapfrog update with a diagonal metric; signed_step < 0 integrates
/// backwards. The target is evaluated once, at the new position.
inline HmcPoint leapfrog(const LogDensity& target, const HmcPoint& z, double signed_step,
                         const Eigen::VectorXd& inv_mass) {
  HmcPoint out;
  const Eigen::VectorXd p_half = z.p + 0.5 * signed_step * z.grad;
  out.q = z.q + signed_step * inv_mass.cwiseProduct(p_half).matrix();
  auto [value, grad] = target.value_gradient(out.q);
  out.value = value;
  out.grad = std::move(grad);
  out.p = p_half + 0.5 * signed_step * out.grad;
  return out;
}

inline double kinetic_energy(const Eigen::VectorXd& p, const Eigen::VectorXd& inv_mass) {
  return 0.5 * p.dot(inv_mass.cwiseProduct(p));
}

struct NutsStepInfo {
  bool accepted = false;   // transition moved to a new position
  bool divergent = false;
  int tree_depth = 0;
  int n_leapfrog = 0;
  double accept_stat = 0.0;  // mean Metropolis ratio over trajectory leaves
  double log_post = 0.0;
  double step_size = 0.0;
};

namespace detail {

struct NutsTree {
  HmcPoint near;  // subtree end adjacent to the start state, in step order
  HmcPoint far;   // subtree end farthest from the start state
  Eigen::VectorXd q_prop;
  Eigen::VectorXd grad_prop;
  double value_prop = 0.0;
  double log_sum_w = -std::numeric_limits<double>::infinity();
  double sum_alpha = 0.0;
  int n_alpha = 0;
  int n_leapfrog = 0;
  bool divergent = false;
  bool uturn = false;
};

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

/// Trajectory turned back on itself: the span from one end to the other
/// opposes the (metric-scaled) momentum at either end. Symmetric in the two
/// ends, so the motion direction only fixes the sign of the span.
inline bool is_uturn(const HmcPoint& lo, const HmcPoint& hi, int dir,
                     const Eigen::VectorXd& inv_mass) {
  const Eigen::VectorXd dq = static_cast<double>(dir) * (hi.q - lo.q);
  return dq.dot(inv_mass.cwiseProduct(lo.p)) < 0.0 || dq.dot(inv_mass.cwiseProduct(hi.p)) < 0.0;
}

inline NutsTree build_tree(const LogDensity& target, int depth, const HmcPoint& start, int dir,
                           double step, const Eigen::VectorXd& inv_mass, double energy0,
                           double div_threshold, Rng& rng) {
  if (depth == 0) {
    NutsTree leaf;
    leaf.near = leapfrog(target, start, dir * step, inv_mass);
    leaf.n_leapfrog = 1;
    const double energy = -leaf.near.value + kinetic_energy(leaf.near.p, inv_mass);
    const double delta_e = energy - energy0;
    // NaN energies (from a degenerate evaluation) count as divergent too.
    leaf.divergent = !(delta_e <= div_threshold);
    leaf.log_sum_w = std::isfinite(delta_e) ? -delta_e : -std::numeric_limits<double>::infinity();
    leaf.sum_alpha = std::isfinite(delta_e) ? std::min(1.0, std::exp(-delta_e)) : 0.0;
    leaf.n_alpha = 1;
    leaf.q_prop = leaf.near.q;
    leaf.grad_prop = leaf.near.grad;
    leaf.value_prop = leaf.near.value;
    leaf.far = leaf.near;
    return leaf;
  }

  NutsTree first =
      build_tree(target, depth - 1, start, dir, step, inv_mass, energy0, div_threshold, rng);
  if (first.divergent || first.uturn) return first;

  NutsTree second =
      build_tree(target, depth - 1, first.far, dir, step, inv_mass, energy0, div_threshold, rng);

  NutsTree out;
  out.near = first.near;
  out.far = second.far;
  out.n_leapfrog = first.n_leapfrog + second.n_leapfrog;
  out.sum_alpha = first.sum_alpha + second.sum_alpha;
  out.n_alpha = first.n_alpha + second.n_alpha;
  out.divergent = second.divergent;
  out.uturn = second.uturn;
  out.log_sum_w = log_add_exp(first.log_sum_w, second.log_sum_w);
  // Proportional (unbiased) proposal selection within a subtree.
  if (std::log(rng.uniform()) < second.log_sum_w - out.log_sum_w) {
    out.q_prop = std::move(second.q_prop);
    out.grad_prop = std::move(second.grad_prop);
    out.value_prop = second.value_prop;
  } else {
    out.q_prop = std::move(first.q_prop);
    out.grad_prop = std::move(first.grad_prop);
    out.value_prop = first.value_prop;
  }
  if (!out.divergent && !out.uturn) out.uturn = is_uturn(out.near, out.far, dir, inv_mass);
  return out;
}

/// Nesterov dual averaging of log step size toward a target acceptance rate.
struct DualAveraging {
  double target = 0.8;
  double mu = 0.0;
  double log_eps = 0.0;
  double log_eps_bar = 0.0;
  double h_bar = 0.0;
  int m = 0;
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;

  void restart(double eps0) {
    mu = std::log(10.0 * eps0);
    log_eps = std::log(eps0);
    log_eps_bar = 0.0;
    h_bar = 0.0;
    m = 0;
  }
  double update(double accept_stat) {
    ++m;
    h_bar += (target - accept_stat - h_bar) / (m + kT0);
    log_eps = mu - std::sqrt(static_cast<double>(m)) / kGamma * h_bar;
    const double eta = std::pow(static_cast<double>(m), -kKappa);
    log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar;
    return std::exp(log_eps);
  }
  double smoothed() const { return std::exp(log_eps_bar); }
};

/// Running mean/variance accumulator (Welford).
struct RunningVariance {
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;
  long n = 0;

  void reset(int dim) {
    mean = Eigen::VectorXd::Zero(dim);
    m2 = Eigen::VectorXd::Zero(dim);
    n = 0;
  }
  void add(const Eigen::VectorXd& x) {
    ++n;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta.cwiseProduct(x - mean);
  }
  /// Sample variance shrunk toward a small constant, as in common HMC warmup
  /// practice, so short windows do not produce degenerate metrics.
  Eigen::VectorXd regularized_variance() const {
    const double nn = static_cast<double>(n);
    const Eigen::VectorXd var = m2 / (nn - 1.0);
    return (nn / (nn + 5.0)) * var.array() + 1e-3 * (5.0 / (nn + 5.0));
  }
};

}  // namespace detail

/// No-U-Turn sampler with multinomial state selection, dual-averaged step
/// size and optional windowed diagonal mass adaptation. The first
/// config.n_adapt calls to step() adapt; afterwards the step size freezes at
/// its dual-averaged smoothed value. With max_tree_depth == 0 each step is a
/// single leapfrog update with a Metropolis correction.
class NutsSampler {
 public:
  NutsSampler(const LogDensity& target, Eigen::VectorXd init, NutsConfig cfg, Rng& rng)
      : target_(target), cfg_(cfg), theta_(std::move(init)) {
    if (theta_.size() != target_.dim()) {
      throw PreconditionError(detail::msg("NutsSampler: init has ", theta_.size(),
                                          " entries, target dimension is ", target_.dim()));
    }
    if (cfg_.max_tree_depth < 0 || cfg_.max_tree_depth > 14) {
      throw PreconditionError("NutsSampler: max_tree_depth must be in [0, 14]");
    }
    if (!(cfg_.target_accept > 0.0 && cfg_.target_accept < 1.0)) {
      throw PreconditionError("NutsSampler: target_accept must lie in (0, 1)");
    }
    std::tie(value_, grad_) = target_.value_gradient(theta_);
    if (!std::isfinite(value_)) {
      throw PreconditionError("NutsSampler: initial point has non-finite log density");
    }
    inv_mass_ = Eigen::VectorXd::Ones(theta_.size());
    step_ = cfg_.initial_step > 0.0 ? cfg_.initial_step : find_reasonable_step(rng);
    da_.target = cfg_.target_accept;
    da_.restart(step_);
    const int min_windowed = kInitBuffer + kBaseWindow + kTermBuffer;
    mass_windows_ = cfg_.adapt_mass && cfg_.n_adapt >= min_windowed;
    if (mass_windows_) {
      window_size_ = kBaseWindow;
      window_end_ = kInitBuffer + kBaseWindow;
      acc_.reset(static_cast<int>(theta_.size()));
    }
  }

  const Eigen::VectorXd& position() const { return theta_; }
  double log_post() const { return value_; }
  double step_size() const { return step_; }
  const Eigen::VectorXd& inv_mass() const { return inv_mass_; }
  bool adapting() const { return iter_ < cfg_.n_adapt; }

  NutsStepInfo step(Rng& rng) {
    NutsStepInfo info = transition(rng);
    if (iter_ < cfg_.n_adapt) {
      step_ = da_.update(info.accept_stat);
      update_mass_window(rng);
    }
    ++iter_;
    if (iter_ == cfg_.n_adapt && cfg_.n_adapt > 0) step_ = da_.smoothed();
    info.step_size = step_;
    return info;
  }

 private:
  static constexpr int kInitBuffer = 75;
  static constexpr int kTermBuffer = 50;
  static constexpr int kBaseWindow = 25;

  NutsStepInfo transition(Rng& rng) {
    NutsStepInfo info;
    const int n = static_cast<int>(theta_.size());
    HmcPoint z0{theta_, Eigen::VectorXd(n), grad_, value_};
    for (int i = 0; i < n; ++i) z0.p[i] = rng.normal() / std::sqrt(inv_mass_[i]);
    const double energy0 = -value_ + kinetic_energy(z0.p, inv_mass_);

    if (cfg_.max_tree_depth == 0) return single_leapfrog(z0, energy0, rng);

    HmcPoint rear = z0;
    HmcPoint front = z0;
    Eigen::VectorXd q_prop = theta_;
    Eigen::VectorXd grad_prop = grad_;
    double value_prop = value_;
    double log_sum_w = 0.0;  // the initial state carries weight exp(0)
    double n_alpha = 0.0;
    bool moved = false;

    for (int depth = 0; depth < cfg_.max_tree_depth; ++depth) {
      const int dir = rng.uniform() < 0.5 ? -1 : 1;
      const HmcPoint& start = dir == 1 ? front : rear;
      detail::NutsTree tree = detail::build_tree(target_, depth, start, dir, step_, inv_mass_,
                                                 energy0, cfg_.divergence_threshold, rng);
      info.n_leapfrog += tree.n_leapfrog;
      info.accept_stat += tree.sum_alpha;
      n_alpha += tree.n_alpha;
      if (tree.divergent) {
        info.divergent = true;
        break;
      }
      if (tree.uturn) break;
      // Biased progressive selection: favor the fresh subtree.
      if (std::log(rng.uniform()) < tree.log_sum_w - log_sum_w) {
        q_prop = std::move(tree.q_prop);
        grad_prop = std::move(tree.grad_prop);
        value_prop = tree.value_prop;
        moved = true;
      }
      log_sum_w = detail::log_add_exp(log_sum_w, tree.log_sum_w);
      if (dir == 1) {
        front = std::move(tree.far);
      } else {
        rear = std::move(tree.far);
      }
      info.tree_depth = depth + 1;
      if (detail::is_uturn(rear, front, 1, inv_mass_)) break;
    }

    info.accept_stat = n_alpha > 0 ? info.accept_stat / n_alpha : 0.0;
    if (!info.divergent && moved) {
      theta_ = std::move(q_prop);
      grad_ = std::move(grad_prop);
      value_ = value_prop;
      info.accepted = true;
    }
    info.log_post = value_;
    return info;
  }

  NutsStepInfo single_leapfrog(const HmcPoint& z0, double energy0, Rng& rng) {
    NutsStepInfo info;
    info.n_leapfrog = 1;
    const HmcPoint z1 = leapfrog(target_, z0, step_, inv_mass_);
    const double energy = -z1.value + kinetic_energy(z1.p, inv_mass_);
    const double delta_e = energy - energy0;
    info.divergent = !(delta_e <= cfg_.divergence_threshold);
    info.accept_stat = std::isfinite(delta_e) ? std::min(1.0, std::exp(-delta_e)) : 0.0;
    const double u = rng.uniform();
    if (!info.divergent && std::log(u) < -delta_e) {
      theta_ = z1.q;
      grad_ = z1.grad;
      value_ = z1.value;
      info.accepted = true;
    }
    info.log_post = value_;
    return info;
  }

  /// Doubling heuristic: scale the step until a single leapfrog crosses a
  /// Metropolis ratio of one half.
  double find_reasonable_step(Rng& rng) {
    const int n = static_cast<int>(theta_.size());
    HmcPoint z{theta_, Eigen::VectorXd(n), grad_, value_};
    for (int i = 0; i < n; ++i) z.p[i] = rng.normal() / std::sqrt(inv_mass_[i]);
    const double energy0 = -value_ + kinetic_energy(z.p, inv_mass_);
    double eps = 1.0;
    auto log_ratio = [&](double e) {
      const HmcPoint z1 = leapfrog(target_, z, e, inv_mass_);
      const double energy = -z1.value + kinetic_energy(z1.p, inv_mass_);
      return std::isfinite(energy) ? energy0 - energy : -std::numeric_limits<double>::infinity();
    };
    double lr = log_ratio(eps);
    const double dir = lr > std::log(0.5) ? 1.0 : -1.0;
    for (int it = 0; it < 60; ++it) {
      if (dir > 0 ? lr <= std::log(0.5) : lr >= std::log(0.5)) break;
      eps *= dir > 0 ? 2.0 : 0.5;
      if (eps > 1e7 || eps < 1e-10) break;
      lr = log_ratio(eps);
    }
    return eps;
  }

  void update_mass_window(Rng& rng) {
    if (!mass_windows_) return;
    const int adapt_end = cfg_.n_adapt - kTermBuffer;
    if (iter_ < kInitBuffer || iter_ >= adapt_end) return;
    acc_.add(theta_);
    if (iter_ + 1 != window_end_) return;
    if (acc_.n >= 2) {
      inv_mass_ = acc_.regularized_variance();
      step_ = find_reasonable_step(rng);
      da_.restart(step_);
    }
    acc_.reset(static_cast<int>(theta_.size()));
    window_size_ *= 2;
    window_end_ += window_size_;
    if (window_end_ + 2 * window_size_ > adapt_end) window_end_ = adapt_end;
  }

  const LogDensity& target_;
  NutsConfig cfg_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd grad_;
  double value_ = 0.0;
  Eigen::VectorXd inv_mass_;
  double step_ = 1.0;
  detail::DualAveraging da_;
  int iter_ = 0;
  bool mass_windows_ = false;
  int window_size_ = 0;
  int window_end_ = 0;
  detail::RunningVariance acc_;
};

}  // namespace smcmc
