#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "smcmc/dual.hpp"
#include "smcmc/errors.hpp"

namespace smcmc {

/// Bundled scalar target evaluation: value, gradient, Hessian.
struct DerivBundle {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

namespace detail {

inline const double kSqrtEps = std::sqrt(std::numeric_limits<double>::epsilon());
inline const double kCbrtEps = std::cbrt(std::numeric_limits<double>::epsilon());

// Relative step with an absolute floor for coordinates near zero.
inline double fd_step(double x, double rel, double override_step) {
  if (override_step > 0.0) return override_step;
  double ax = std::fabs(x);
  return ax < 1e-8 ? rel : rel * ax;
}

template <typename F>
double probe(const F& f, std::vector<double>& x) {
  double y = f(std::span<const double>(x));
  if (!std::isfinite(y)) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite value in finite-difference probe at theta = [";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << "]";
    throw NumericalError(os.str());
  }
  return y;
}

}  // namespace detail

/// Central-difference gradient with per-coordinate step sqrt(eps)*|theta_i|
/// (floored to sqrt(eps) when |theta_i| < 1e-8). `step_override` > 0 replaces
/// the rule with a fixed absolute step. 2N evaluations.
template <typename F>
Eigen::VectorXd fd_gradient(const F& f, Eigen::Ref<const Eigen::VectorXd> theta,
                            double step_override = 0.0) {
  const int n = static_cast<int>(theta.size());
  std::vector<double> x(theta.data(), theta.data() + n);
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    const double h = detail::fd_step(theta[i], detail::kSqrtEps, step_override);
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = detail::probe(f, x);
    x[i] = xi - h;
    const double fm = detail::probe(f, x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central difference of central-difference gradients with per-coordinate
/// step cbrt(eps)*|theta_i| (floored as in fd_gradient). The four-point cross
/// stencil is symmetric in (i, j), so only the upper triangle is evaluated
/// and mirrored. O(N^2) evaluations.
template <typename F>
Eigen::MatrixXd fd_hessian(const F& f, Eigen::Ref<const Eigen::VectorXd> theta,
                           double step_override = 0.0) {
  const int n = static_cast<int>(theta.size());
  std::vector<double> x(theta.data(), theta.data() + n);
  Eigen::MatrixXd h_mat(n, n);
  const double f0 = detail::probe(f, x);
  for (int i = 0; i < n; ++i) {
    const double hi = detail::fd_step(theta[i], detail::kCbrtEps, step_override);
    for (int j = i; j < n; ++j) {
      const double hj = detail::fd_step(theta[j], detail::kCbrtEps, step_override);
      double sum;
      if (i == j) {
        const double xi = x[i];
        x[i] = xi + 2.0 * hi;
        const double fpp = detail::probe(f, x);
        x[i] = xi - 2.0 * hi;
        const double fmm = detail::probe(f, x);
        x[i] = xi;
        sum = fpp - 2.0 * f0 + fmm;
      } else {
        const double xi = x[i];
        const double xj = x[j];
        x[i] = xi + hi;
        x[j] = xj + hj;
        const double fpp = detail::probe(f, x);
        x[j] = xj - hj;
        const double fpm = detail::probe(f, x);
        x[i] = xi - hi;
        const double fmm = detail::probe(f, x);
        x[j] = xj + hj;
        const double fmp = detail::probe(f, x);
        x[i] = xi;
        x[j] = xj;
        sum = fpp - fpm - fmp + fmm;
      }
      const double value = sum / (4.0 * hi * hj);
      h_mat(i, j) = value;
      h_mat(j, i) = value;
    }
  }
  // Mirrored assignment already yields (H + H^T)/2 of the raw stencil.
  return h_mat;
}

/// Forward-mode gradient: N evaluations with one seeded tangent each.
/// Exact to roundoff for differentiable f.
template <typename F>
Eigen::VectorXd dual_gradient(const F& f, Eigen::Ref<const Eigen::VectorXd> theta) {
  const int n = static_cast<int>(theta.size());
  std::vector<Dual1> x(n);
  for (int i = 0; i < n; ++i) x[i] = Dual1{theta[i], 0.0};
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    x[i].d = 1.0;
    Dual1 y = f(std::span<const Dual1>(x));
    x[i].d = 0.0;
    if (!is_finite(y)) {
      throw NumericalError(detail::msg("non-finite dual evaluation in gradient seed ", i));
    }
    g[i] = y.d;
  }
  return g;
}

/// Tangent-over-tangent Hessian: N(N+1)/2 second-order evaluations, one per
/// unordered coordinate pair. Each diagonal seed also carries the gradient
/// component, so (value, gradient, Hessian) come from a single sweep. The
/// result is exactly symmetric by construction.
template <typename F>
DerivBundle dual2_all(const F& f, Eigen::Ref<const Eigen::VectorXd> theta) {
  const int n = static_cast<int>(theta.size());
  std::vector<Dual2> x(n);
  for (int i = 0; i < n; ++i) x[i] = make_dual2(theta[i], 0.0, 0.0);
  DerivBundle out;
  out.gradient.resize(n);
  out.hessian.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      x[i].d.v = 1.0;  // tangent1 -> direction i
      x[j].v.d = 1.0;  // tangent2 -> direction j
      Dual2 y = f(std::span<const Dual2>(x));
      x[i].d.v = 0.0;
      x[j].v.d = 0.0;
      if (!is_finite(y)) {
        throw NumericalError(
            detail::msg("non-finite dual evaluation in Hessian seed (", i, ", ", j, ")"));
      }
      out.hessian(i, j) = cross(y);
      out.hessian(j, i) = cross(y);
      if (i == j) {
        out.gradient[i] = tangent1(y);
        if (i == 0) out.value = primal(y);
      }
    }
  }
  return out;
}

template <typename F>
Eigen::MatrixXd dual2_hessian(const F& f, Eigen::Ref<const Eigen::VectorXd> theta) {
  return dual2_all(f, theta).hessian;
}

}  // namespace smcmc
