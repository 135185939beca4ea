#pragma once

#include <limits>
#include <span>

#include "smcmc/eigs.hpp"
#include "smcmc/model.hpp"
#include "smcmc/periodogram.hpp"

namespace smcmc {

// ===== Frequency-domain machinery =====
//
// For a stable linear SDE dX = A X dt + P(t), the steady-state transfer
// matrix is the resolvent T(omega) = (i omega I - A)^-1 expressed through the
// eigendecomposition,
//     T_ij(omega) = sum_k R_ik * (1 / (c_k (i omega - lambda_k))) * L_kj,
// the observed component's spectral density is
//     f_Y(omega) = |T_ij(omega)|^2 f_Pj(omega) + sigma_obs^2 delta_t
// (single input component j, observed component i), and the Whittle
// log likelihood of periodogram ordinates S_k is
//     sum_conditions sum_k [ -log f_Y(omega_k) - S_k / f_Y(omega_k) ].

/// One entry of the transfer matrix at angular frequency omega.
/// Throws if i omega collides with an eigenvalue (singular resolvent);
/// a stable spectrum (Re lambda < 0) never triggers this for real omega.
template <typename S>
ComplexOf<S> transfer_element(const EigenDecomp<S>& d, double omega, int i, int j) {
  if (i < 0 || i >= d.n || j < 0 || j >= d.n) {
    throw PreconditionError(
        detail::msg("transfer_element: index (", i, ", ", j, ") out of range for n = ", d.n));
  }
  ComplexOf<S> sum{S(0.0), S(0.0)};
  for (int k = 0; k < d.n; ++k) {
    ComplexOf<S> den{-d.lambda[k].re, omega - d.lambda[k].im};
    if (primal(abs2(den)) < 1e-300) {
      throw NumericalError(detail::msg("transfer_element: singular resolvent at omega = ", omega,
                                       " (i*omega equals an eigenvalue)"));
    }
    sum = sum + d.r(i, k) * (d.l(k, j) / (d.c[k] * den));
  }
  return sum;
}

namespace detail {

// Per-eigenvalue weights w_k = R_ik L_kj / c_k, hoisted out of frequency
// loops so each grid point costs one complex division per eigenvalue.
template <typename S>
std::vector<ComplexOf<S>> transfer_weights(const EigenDecomp<S>& d, int i, int j) {
  std::vector<ComplexOf<S>> w(d.n);
  for (int k = 0; k < d.n; ++k) w[k] = d.r(i, k) * (d.l(k, j) / d.c[k]);
  return w;
}

template <typename S>
ComplexOf<S> transfer_from_weights(const std::vector<ComplexOf<S>>& w,
                                   const std::vector<ComplexOf<S>>& lambda, double omega) {
  ComplexOf<S> sum{S(0.0), S(0.0)};
  for (std::size_t k = 0; k < w.size(); ++k) {
    ComplexOf<S> den{-lambda[k].re, omega - lambda[k].im};
    sum = sum + w[k] / den;
  }
  return sum;
}

}  // namespace detail

/// Spectral density of the observed component at angular frequency omega:
/// strictly positive, bounded below by the observation-noise term.
template <typename S, typename M>
  requires StableSdeModel<M, S>
S spectral_density(const M& model, std::span<const S> flat, const ParamSpec& spec, int condition,
                   double omega) {
  SquareMat<S> a = model.template drift_jacobian<S>(flat, spec, condition);
  EigenDecomp<S> d = eigen_decompose(a);
  const int i = model.observed_component();
  const int j = model.input_component();
  ComplexOf<S> t = transfer_element(d, omega, i, j);
  S f_in = model.template input_psd<S>(flat, spec, condition, omega, j);
  return abs2(t) * f_in + model.obs_psd_term();
}

/// Whittle log likelihood over all conditions. Out-of-support parameters
/// yield -inf rather than throwing, so samplers can reject such proposals
/// without exception traffic on the hot path.
template <typename S, typename M>
  requires StableSdeModel<M, S>
S whittle_loglik(const M& model, std::span<const S> flat, const ParamSpec& spec,
                 std::span<const SpectralData> data) {
  if (static_cast<int>(data.size()) != spec.n_conditions()) {
    throw PreconditionError(detail::msg("whittle_loglik: ", data.size(),
                                        " data sets for ", spec.n_conditions(), " conditions"));
  }
  if (!spec.in_support(flat)) {
    return S(-std::numeric_limits<double>::infinity());
  }
  using std::log;
  const int i = model.observed_component();
  const int j = model.input_component();
  const double floor_term = model.obs_psd_term();
  // Kahan-compensated accumulation: thousands of terms that can individually
  // dwarf the total would otherwise lose enough precision to corrupt tiny
  // central-difference quotients of this function. Componentwise, so the
  // compensation also applies through dual scalars.
  S total(0.0);
  S comp(0.0);
  for (int cond = 0; cond < spec.n_conditions(); ++cond) {
    const SpectralData& sd = data[cond];
    if (std::fabs(sd.delta_t - model.delta_t()) > 1e-12 * model.delta_t()) {
      throw PreconditionError(detail::msg("whittle_loglik: data sampled at delta_t = ",
                                          sd.delta_t, " but the model expects ",
                                          model.delta_t()));
    }
    SquareMat<S> a = model.template drift_jacobian<S>(flat, spec, cond);
    EigenDecomp<S> d = eigen_decompose(a);
    std::vector<ComplexOf<S>> w = detail::transfer_weights(d, i, j);
    // White input lets the input PSD hoist out of the frequency loop.
    S f_in_white(0.0);
    if (model.white_input()) {
      f_in_white = model.template input_psd<S>(flat, spec, cond, 0.0, j);
    }
    for (std::size_t k = 0; k < sd.omega.size(); ++k) {
      ComplexOf<S> t = detail::transfer_from_weights(w, d.lambda, sd.omega[k]);
      S f_in = model.white_input()
                   ? f_in_white
                   : model.template input_psd<S>(flat, spec, cond, sd.omega[k], j);
      S f = abs2(t) * f_in + floor_term;
      const S term = -log(f) - sd.s[k] / f;
      const S y = term - comp;
      const S t2 = total + y;
      comp = (t2 - total) - y;
      total = t2;
    }
  }
  return total;
}

}  // namespace smcmc
