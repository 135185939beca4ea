#pragma once

#include <concepts>
#include <span>
#include <vector>

#include "smcmc/params.hpp"

namespace smcmc {

/// Dense square matrix over a generic scalar, row-major. Deliberately tiny:
/// drift Jacobians are small (the bundled model is 2x2) and dual scalars must
/// pass through without any linear-algebra library in the way.
template <typename S>
struct SquareMat {
  int n = 0;
  std::vector<S> a;

  SquareMat() = default;
  explicit SquareMat(int size) : n(size), a(static_cast<std::size_t>(size) * size) {
    if (size <= 0) throw PreconditionError("SquareMat: size must be positive");
  }
  SquareMat(int size, std::vector<S> data) : n(size), a(std::move(data)) {
    if (size <= 0) throw PreconditionError("SquareMat: size must be positive");
    if (a.size() != static_cast<std::size_t>(size) * size) {
      throw PreconditionError(
          detail::msg("SquareMat: ", a.size(), " entries do not form a ", size, "x", size,
                      " matrix"));
    }
  }

  S& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const S& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Contract every stable linear SDE model satisfies:
///   dX = A(theta) X dt + P(t),   Y_k = X_obs(k dt) + eps_k,
/// where A is the drift Jacobian, P has a per-component input power spectral
/// density, and eps is i.i.d. observation noise whose flat spectral
/// contribution is obs_psd_term(). New models supply exactly these pieces.
template <typename M, typename S>
concept StableSdeModel = requires(const M& m, std::span<const S> flat, const ParamSpec& spec,
                                  int condition, double omega, int component) {
  { m.state_dim() } -> std::convertible_to<int>;
  { m.observed_component() } -> std::convertible_to<int>;
  { m.input_component() } -> std::convertible_to<int>;
  { m.template drift_jacobian<S>(flat, spec, condition) } -> std::same_as<SquareMat<S>>;
  { m.template input_psd<S>(flat, spec, condition, omega, component) } -> std::same_as<S>;
  { m.white_input() } -> std::convertible_to<bool>;
  { m.obs_psd_term() } -> std::convertible_to<double>;
  { m.delta_t() } -> std::convertible_to<double>;
};

/// Named view of one condition's oscillator parameters.
template <typename S>
struct OscillatorParams {
  S omega0;    // natural angular frequency
  S zeta;      // damping ratio
  S sigma_in;  // input noise scale (flat two-sided input PSD = sigma_in^2)
};

/// Noise-driven damped harmonic oscillator in companion form,
///   A = [[0, 1], [-omega0^2, -2 zeta omega0]],
/// driven by white noise on the velocity component, observed on the position
/// component with Gaussian noise of standard deviation sigma_obs at sampling
/// interval delta_t. Expects spec entries named "omega0", "zeta", "sigma_in".
class HarmonicOscillatorModel {
 public:
  HarmonicOscillatorModel(double sigma_obs, double delta_t)
      : sigma_obs_(sigma_obs), delta_t_(delta_t) {
    if (sigma_obs < 0.0) throw PreconditionError("oscillator: sigma_obs must be >= 0");
    if (!(delta_t > 0.0)) throw PreconditionError("oscillator: delta_t must be > 0");
  }

  int state_dim() const { return 2; }
  int observed_component() const { return 0; }
  int input_component() const { return 1; }
  bool white_input() const { return true; }
  double sigma_obs() const { return sigma_obs_; }
  double delta_t() const { return delta_t_; }

  /// Flat spectral contribution of the observation noise: sigma_obs^2 * delta_t.
  double obs_psd_term() const { return sigma_obs_ * sigma_obs_ * delta_t_; }

  template <typename S>
  OscillatorParams<S> unpack(std::span<const S> flat, const ParamSpec& spec,
                             int condition) const {
    return {spec.value(flat, "omega0", condition), spec.value(flat, "zeta", condition),
            spec.value(flat, "sigma_in", condition)};
  }

  template <typename S>
  SquareMat<S> drift_jacobian(std::span<const S> flat, const ParamSpec& spec,
                              int condition) const {
    require_support(flat, spec);
    OscillatorParams<S> p = unpack(flat, spec, condition);
    SquareMat<S> a(2);
    a(0, 0) = S(0.0);
    a(0, 1) = S(1.0);
    a(1, 0) = -(p.omega0 * p.omega0);
    a(1, 1) = -2.0 * (p.zeta * p.omega0);
    return a;
  }

  /// Two-sided input PSD per state component: sigma_in^2 on the driven
  /// component, 0 elsewhere. Frequency-independent (white input).
  template <typename S>
  S input_psd(std::span<const S> flat, const ParamSpec& spec, int condition,
              double /*omega*/, int component) const {
    require_support(flat, spec);
    if (component < 0 || component >= state_dim()) {
      throw PreconditionError(detail::msg("oscillator: component ", component, " out of range"));
    }
    if (component != input_component()) return S(0.0);
    S s = unpack(flat, spec, condition).sigma_in;
    return s * s;
  }

 private:
  template <typename S>
  void require_support(std::span<const S> flat, const ParamSpec& spec) const {
    if (!spec.in_support(flat)) {
      std::ostringstream os;
      os.precision(17);
      os << "oscillator: parameters outside the prior box: [";
      for (std::size_t i = 0; i < flat.size(); ++i) os << (i ? ", " : "") << primal(flat[i]);
      os << "]";
      throw PreconditionError(os.str());
    }
  }

  double sigma_obs_;
  double delta_t_;
};

static_assert(StableSdeModel<HarmonicOscillatorModel, double>);
static_assert(StableSdeModel<HarmonicOscillatorModel, Dual1>);
static_assert(StableSdeModel<HarmonicOscillatorModel, Dual2>);

/// Default prior box for the oscillator: omega0 and sigma_in vary per
/// condition, the damping ratio is shared. The zeta upper bound stays below
/// critical damping so the drift eigenvalues remain a simple conjugate pair.
inline ParamSpec default_oscillator_spec(int n_conditions) {
  return ParamSpec(
      {
          {"omega0", 1.0, 200.0, false},
          {"sigma_in", 0.1, 500.0, false},
          {"zeta", 0.01, 0.99, true},
      },
      n_conditions);
}

}  // namespace smcmc
