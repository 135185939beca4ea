#pragma once

#include <Eigen/Core>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smcmc/derivatives.hpp"
#include "smcmc/spectral.hpp"

namespace smcmc {

/// Differentiable log target consumed by the samplers. Out-of-support points
/// report -inf with zero derivatives; implementations must not throw for
/// merely out-of-support inputs.
class LogDensity {
 public:
  virtual ~LogDensity() = default;
  virtual int dim() const = 0;
  virtual double log_density(Eigen::Ref<const Eigen::VectorXd> theta) const = 0;
  virtual Eigen::VectorXd gradient(Eigen::Ref<const Eigen::VectorXd> theta) const = 0;
  virtual Eigen::MatrixXd hessian(Eigen::Ref<const Eigen::VectorXd> theta) const = 0;

  virtual std::pair<double, Eigen::VectorXd> value_gradient(
      Eigen::Ref<const Eigen::VectorXd> theta) const {
    return {log_density(theta), gradient(theta)};
  }
  virtual DerivBundle value_gradient_hessian(Eigen::Ref<const Eigen::VectorXd> theta) const {
    return {log_density(theta), gradient(theta), hessian(theta)};
  }
};

enum class DerivEngine { fd, ad };

inline const char* to_string(DerivEngine e) { return e == DerivEngine::fd ? "fd" : "ad"; }

/// Posterior over SDE parameters given periodogram data: Whittle log
/// likelihood plus a uniform box prior (log prior contributes 0 inside the
/// box, -inf outside; the normalizing constant is dropped). Derivatives come
/// from the configured engine: central finite differences of the double
/// evaluation, or dual-number forward propagation through the same code path.
template <typename M>
class Posterior final : public LogDensity {
 public:
  Posterior(M model, ParamSpec spec, std::vector<SpectralData> data, DerivEngine engine,
            double fd_step_override = 0.0)
      : model_(std::move(model)),
        spec_(std::move(spec)),
        data_(std::move(data)),
        engine_(engine),
        fd_step_(fd_step_override) {
    if (static_cast<int>(data_.size()) != spec_.n_conditions()) {
      throw PreconditionError(detail::msg("Posterior: ", data_.size(), " data sets for ",
                                          spec_.n_conditions(), " conditions"));
    }
  }

  const ParamSpec& spec() const { return spec_; }
  const M& model() const { return model_; }
  DerivEngine engine() const { return engine_; }

  template <typename S>
  S log_density_s(std::span<const S> flat) const {
    return whittle_loglik<S>(model_, flat, spec_, std::span<const SpectralData>(data_));
  }

  int dim() const override { return spec_.dim(); }

  double log_density(Eigen::Ref<const Eigen::VectorXd> theta) const override {
    return log_density_s(std::span<const double>(theta.data(), theta.size()));
  }

  Eigen::VectorXd gradient(Eigen::Ref<const Eigen::VectorXd> theta) const override {
    if (!spec_.in_support(theta)) return Eigen::VectorXd::Zero(theta.size());
    if (engine_ == DerivEngine::fd) {
      return fd_gradient([this](std::span<const double> x) { return log_density_s(x); }, theta,
                         fd_step_);
    }
    return dual_gradient([this](std::span<const Dual1> x) { return log_density_s(x); }, theta);
  }

  Eigen::MatrixXd hessian(Eigen::Ref<const Eigen::VectorXd> theta) const override {
    if (!spec_.in_support(theta)) return Eigen::MatrixXd::Zero(theta.size(), theta.size());
    if (engine_ == DerivEngine::fd) {
      return fd_hessian([this](std::span<const double> x) { return log_density_s(x); }, theta,
                        fd_step_);
    }
    return dual2_hessian([this](std::span<const Dual2> x) { return log_density_s(x); }, theta);
  }

  std::pair<double, Eigen::VectorXd> value_gradient(
      Eigen::Ref<const Eigen::VectorXd> theta) const override {
    if (!spec_.in_support(theta)) {
      return {-std::numeric_limits<double>::infinity(), Eigen::VectorXd::Zero(theta.size())};
    }
    return {log_density(theta), gradient(theta)};
  }

  /// One fused sweep: the ad engine reads value, gradient and Hessian off a
  /// single second-order pass; fd composes the plain evaluations.
  DerivBundle value_gradient_hessian(Eigen::Ref<const Eigen::VectorXd> theta) const override {
    if (!spec_.in_support(theta)) {
      return {-std::numeric_limits<double>::infinity(), Eigen::VectorXd::Zero(theta.size()),
              Eigen::MatrixXd::Zero(theta.size(), theta.size())};
    }
    if (engine_ == DerivEngine::ad) {
      return dual2_all([this](std::span<const Dual2> x) { return log_density_s(x); }, theta);
    }
    return {log_density(theta), gradient(theta), hessian(theta)};
  }

 private:
  M model_;
  ParamSpec spec_;
  std::vector<SpectralData> data_;
  DerivEngine engine_;
  double fd_step_;
};

using OscillatorPosterior = Posterior<HarmonicOscillatorModel>;

}  // namespace smcmc
