#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <vector>

#include "smcmc/eigs.hpp"
#include "smcmc/model.hpp"
#include "smcmc/rng.hpp"

namespace smcmc {

/// Sampled state path: row k is the state at t_k = k * delta_t.
struct Trajectory {
  std::vector<double> t;
  Eigen::MatrixXd x;  // n_samples x state_dim
  double delta_t = 0.0;
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  /// Euler-Maruyama substeps per output sample; 0 picks the smallest count
  /// that keeps the explicit scheme stable and its damping bias ~2% (see
  /// auto_substeps). Values >= 1 force that exact count.
  int substeps = 0;
  /// Seconds of pre-roll integrated and discarded before t = 0.
  double warmup_seconds = 0.0;
  /// Initial state; defaults to zero.
  std::optional<Eigen::VectorXd> x0;
};

namespace detail {

// Explicit Euler on dx = A x dt has discrete poles 1 + lambda dt. Keeping
// |lambda| dt small bounds the phase error, and the second constraint bounds
// the relative damping error dt * Im(lambda)^2 / (2 |Re lambda|) near 2%.
inline int auto_substeps(const EigenDecomp<double>& d, double delta_t) {
  double dt_max = delta_t;
  for (const auto& lam : d.lambda) {
    const double re = lam.re;
    const double im = lam.im;
    const double mag = std::sqrt(re * re + im * im);
    if (mag > 0.0) dt_max = std::min(dt_max, 0.04 / mag);
    if (im != 0.0 && re != 0.0) dt_max = std::min(dt_max, 0.04 * std::fabs(re) / (im * im));
  }
  return std::max(1, static_cast<int>(std::ceil(delta_t / dt_max)));
}

}  // namespace detail

/// Integrates dX = A X dt + P(t) with the Euler-Maruyama scheme
///   x_{k+1} = x_k + A x_k dt + b * sigma * sqrt(dt) z_k,   z_k ~ N(0, 1),
/// at step dt = delta_t / substeps, recording every substeps-th state. The
/// drift must be stable (all Re lambda < 0) and the chosen step must keep the
/// discrete update contractive; both are checked up front.
template <typename M>
  requires StableSdeModel<M, double>
Trajectory simulate_sde(const M& model, const ParamVector& theta, int condition, double duration,
                        double delta_t, std::uint64_t seed, const SimulateOptions& options = {}) {
  if (theta.spec == nullptr) throw PreconditionError("simulate_sde: parameter vector has no spec");
  if (!(delta_t > 0.0)) throw PreconditionError("simulate_sde: delta_t must be > 0");
  const double n_real = duration / delta_t;
  const int n = static_cast<int>(std::llround(n_real));
  if (n < 4 || std::fabs(n_real - n) > 1e-9 * std::max(1.0, n_real)) {
    throw PreconditionError(detail::msg("simulate_sde: duration / delta_t must be an integer >= 4, got ",
                                        n_real));
  }
  std::span<const double> flat(theta.values.data(), theta.values.size());
  const int dim = model.state_dim();
  SquareMat<double> a = model.template drift_jacobian<double>(flat, *theta.spec, condition);
  EigenDecomp<double> decomp = eigen_decompose(a);
  for (const auto& lam : decomp.lambda) {
    if (!(lam.re < 0.0)) {
      throw NumericalError(detail::msg("simulate_sde: unstable drift, eigenvalue with Re = ",
                                       lam.re, " >= 0"));
    }
  }

  const int substeps =
      options.substeps > 0 ? options.substeps : detail::auto_substeps(decomp, delta_t);
  const double dt = delta_t / static_cast<double>(substeps);
  for (const auto& lam : decomp.lambda) {
    // |1 + lambda dt|^2 < 1 is the contractivity condition of explicit Euler.
    const double g2 = (1.0 + lam.re * dt) * (1.0 + lam.re * dt) + (lam.im * dt) * (lam.im * dt);
    if (g2 >= 1.0) {
      throw NumericalError(detail::msg(
          "simulate_sde: explicit step ", dt, " is unstable for eigenvalue (", lam.re, ", ",
          lam.im, "i); increase substeps"));
    }
  }

  // Per-component noise scales sqrt(input PSD); only components actually
  // driven consume draws, in ascending component order.
  std::vector<double> noise_scale(dim, 0.0);
  for (int c = 0; c < dim; ++c) {
    const double psd = model.template input_psd<double>(flat, *theta.spec, condition, 0.0, c);
    noise_scale[c] = psd > 0.0 ? std::sqrt(psd) : 0.0;
  }

  Rng rng(seed);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  if (options.x0.has_value()) {
    if (options.x0->size() != dim) {
      throw PreconditionError(detail::msg("simulate_sde: x0 has ", options.x0->size(),
                                          " components, state dim is ", dim));
    }
    x = *options.x0;
  }

  Eigen::VectorXd drift(dim);
  const double sqrt_dt = std::sqrt(dt);
  auto substep = [&]() {
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int j = 0; j < dim; ++j) acc += a(i, j) * x[j];
      drift[i] = acc;
    }
    for (int i = 0; i < dim; ++i) {
      x[i] += dt * drift[i];
      if (noise_scale[i] > 0.0) x[i] += noise_scale[i] * sqrt_dt * rng.normal();
    }
  };

  if (options.warmup_seconds > 0.0) {
    const long warm = std::lround(options.warmup_seconds / dt);
    for (long k = 0; k < warm; ++k) substep();
  }

  Trajectory traj;
  traj.delta_t = delta_t;
  traj.seed = seed;
  traj.t.resize(n);
  traj.x.resize(n, dim);
  for (int k = 0; k < n; ++k) {
    traj.t[k] = static_cast<double>(k) * delta_t;
    traj.x.row(k) = x.transpose();
    if (k + 1 < n) {
      for (int s = 0; s < substeps; ++s) substep();
    }
  }
  return traj;
}

/// Observation series y_k = x_component(t_k) + sigma_obs * z_k with an
/// independent noise stream.
inline std::vector<double> observe(const Trajectory& traj, int component, double sigma_obs,
                                   std::uint64_t seed) {
  if (component < 0 || component >= traj.x.cols()) {
    throw PreconditionError(detail::msg("observe: component ", component, " out of range"));
  }
  if (sigma_obs < 0.0) throw PreconditionError("observe: sigma_obs must be >= 0");
  Rng rng(seed);
  std::vector<double> y(traj.x.rows());
  for (Eigen::Index k = 0; k < traj.x.rows(); ++k) {
    y[k] = traj.x(k, component) + sigma_obs * rng.normal();
  }
  return y;
}

}  // namespace smcmc
