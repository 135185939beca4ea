#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <utility>

#include "smcmc/errors.hpp"
#include "smcmc/posterior.hpp"
#include "smcmc/rng.hpp"

namespace smcmc {

struct SmmalaConfig {
  double step_size = 1.0;
  /// Eigenvalues of the negated Hessian are clamped to at least this value
  /// (after taking absolute values), keeping the proposal covariance positive
  /// definite near saddle points and flat directions.
  double hessian_floor = 1e-6;
};

/// Gaussian proposal moments of the simplified manifold MALA step: the local
/// metric is the regularized negated Hessian, the proposal covariance is
/// C = h^2 * metric^{-1} and the mean drifts half a step along C * gradient.
struct SmmalaMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd eigvecs;    // columns: eigenvectors of the regularized metric
  Eigen::VectorXd metric_eig; // clamped eigenvalues d of the metric; C = h^2 V d^{-1} V^T
  double step_size = 1.0;

  Eigen::MatrixXd covariance() const {
    return step_size * step_size * eigvecs * metric_eig.cwiseInverse().asDiagonal() *
           eigvecs.transpose();
  }

  /// log N(x | mean, C) including the normalizing constant.
  double log_q(const Eigen::VectorXd& x) const {
    const int k = static_cast<int>(mean.size());
    const Eigen::VectorXd w = eigvecs.transpose() * (x - mean);
    double quad = 0.0;
    double logdet = 0.0;
    const double h2 = step_size * step_size;
    for (int i = 0; i < k; ++i) {
      quad += w[i] * w[i] * metric_eig[i] / h2;
      logdet += std::log(h2 / metric_eig[i]);
    }
    constexpr double kLog2Pi = 1.8378770664093454836;
    return -0.5 * (k * kLog2Pi + logdet + quad);
  }

  /// Draws exactly dim() standard normals from rng, in coordinate order.
  Eigen::VectorXd sample(Rng& rng) const {
    const int k = static_cast<int>(mean.size());
    Eigen::VectorXd z(k);
    for (int i = 0; i < k; ++i) z[i] = rng.normal();
    return mean + step_size * (eigvecs * (z.cwiseQuotient(metric_eig.cwiseSqrt())));
  }
};

inline SmmalaMoments smmala_moments(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                                    const Eigen::MatrixXd& hess, const SmmalaConfig& cfg) {
  const int k = static_cast<int>(theta.size());
  if (grad.size() != k || hess.rows() != k || hess.cols() != k) {
    throw PreconditionError("smmala_moments: inconsistent dimensions");
  }
  if (!(cfg.step_size > 0.0) || !(cfg.hessian_floor > 0.0)) {
    throw PreconditionError("smmala_moments: step_size and hessian_floor must be positive");
  }
  const Eigen::MatrixXd metric = -0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(metric);
  if (es.info() != Eigen::Success) {
    throw NumericalError("smmala_moments: eigendecomposition of the metric failed");
  }
  SmmalaMoments m;
  m.eigvecs = es.eigenvectors();
  m.metric_eig = es.eigenvalues().cwiseAbs().cwiseMax(cfg.hessian_floor);
  m.step_size = cfg.step_size;
  // C * grad / 2 through the factored form, avoiding an explicit inverse.
  const Eigen::VectorXd w = m.eigvecs.transpose() * grad;
  m.mean = theta + 0.5 * cfg.step_size * cfg.step_size *
                       (m.eigvecs * w.cwiseQuotient(m.metric_eig).matrix());
  return m;
}

/// log acceptance ratio for moving cur -> prop where each side carries its own
/// local proposal moments. Exposed separately so tests can check detailed
/// balance without driving the sampler.
inline double smmala_log_alpha(double value_cur, const SmmalaMoments& mom_cur,
                               double value_prop, const SmmalaMoments& mom_prop,
                               const Eigen::VectorXd& theta_cur,
                               const Eigen::VectorXd& theta_prop) {
  if (value_prop == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double la = (value_prop - value_cur) + mom_prop.log_q(theta_cur) - mom_cur.log_q(theta_prop);
  return la < 0.0 ? la : 0.0;
}

struct SmmalaStepInfo {
  bool accepted = false;
  double log_alpha = 0.0;
  double log_post = 0.0;  // log density at the (possibly new) current point
};

/// Metropolis-adjusted sampler with a position-dependent Gaussian proposal.
/// Derivative information at the current point is cached between steps, so a
/// rejected step costs one posterior sweep, not two. Per step the rng is
/// consumed in a fixed order: dim() proposal normals, then one uniform.
class SmmalaSampler {
 public:
  SmmalaSampler(const LogDensity& target, Eigen::VectorXd init, SmmalaConfig cfg = {})
      : target_(target), cfg_(cfg), theta_(std::move(init)) {
    if (theta_.size() != target_.dim()) {
      throw PreconditionError(detail::msg("SmmalaSampler: init has ", theta_.size(),
                                          " entries, target dimension is ", target_.dim()));
    }
    bundle_ = target_.value_gradient_hessian(theta_);
    if (!std::isfinite(bundle_.value)) {
      throw PreconditionError("SmmalaSampler: initial point has non-finite log density");
    }
    moments_ = smmala_moments(theta_, bundle_.gradient, bundle_.hessian, cfg_);
  }

  const Eigen::VectorXd& position() const { return theta_; }
  double log_post() const { return bundle_.value; }
  const SmmalaMoments& moments() const { return moments_; }

  SmmalaStepInfo step(Rng& rng) {
    const Eigen::VectorXd prop = moments_.sample(rng);
    const double u = rng.uniform();
    const DerivBundle cand = target_.value_gradient_hessian(prop);
    SmmalaStepInfo info;
    if (cand.value == -std::numeric_limits<double>::infinity()) {
      info.log_alpha = -std::numeric_limits<double>::infinity();
    } else {
      const SmmalaMoments mom_prop = smmala_moments(prop, cand.gradient, cand.hessian, cfg_);
      info.log_alpha = smmala_log_alpha(bundle_.value, moments_, cand.value, mom_prop, theta_, prop);
      if (std::log(u) < info.log_alpha) {
        theta_ = prop;
        bundle_ = cand;
        moments_ = mom_prop;
        info.accepted = true;
      }
    }
    info.log_post = bundle_.value;
    return info;
  }

 private:
  const LogDensity& target_;
  SmmalaConfig cfg_;
  Eigen::VectorXd theta_;
  DerivBundle bundle_;
  SmmalaMoments moments_;
};

}  // namespace smcmc
