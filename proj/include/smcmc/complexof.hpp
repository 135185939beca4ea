#pragma once

#include <cmath>

#include "smcmc/dual.hpp"

namespace smcmc {

/// Complex number over a generic real scalar S (double or a dual type).
/// Composition order is complex-of-dual: each part carries its own tangents.
/// Magnitude tests that steer branches look at primal parts only.
template <typename S>
struct ComplexOf {
  S re{};
  S im{};

  constexpr ComplexOf() = default;
  constexpr ComplexOf(S r, S i) : re(r), im(i) {}
  explicit constexpr ComplexOf(S r) : re(r), im() {}
};

template <typename S>
constexpr ComplexOf<S> conj(const ComplexOf<S>& z) {
  return {z.re, -z.im};
}

/// re^2 + im^2, branch-free so dual tangents flow through untouched.
template <typename S>
constexpr S abs2(const ComplexOf<S>& z) {
  return z.re * z.re + z.im * z.im;
}

template <typename S>
constexpr ComplexOf<S> operator-(const ComplexOf<S>& z) {
  return {-z.re, -z.im};
}

template <typename S>
constexpr ComplexOf<S> operator+(const ComplexOf<S>& a, const ComplexOf<S>& b) {
  return {a.re + b.re, a.im + b.im};
}
template <typename S>
constexpr ComplexOf<S> operator-(const ComplexOf<S>& a, const ComplexOf<S>& b) {
  return {a.re - b.re, a.im - b.im};
}

template <typename S>
constexpr ComplexOf<S> operator*(const ComplexOf<S>& a, const ComplexOf<S>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <typename S>
constexpr ComplexOf<S> operator*(const ComplexOf<S>& a, const S& s) {
  return {a.re * s, a.im * s};
}
template <typename S>
constexpr ComplexOf<S> operator*(const S& s, const ComplexOf<S>& a) {
  return {s * a.re, s * a.im};
}

template <typename S>
constexpr ComplexOf<S> operator/(const ComplexOf<S>& a, const S& s) {
  return {a.re / s, a.im / s};
}

/// Smith's algorithm; the |re| >= |im| branch decision uses primal magnitudes.
template <typename S>
constexpr ComplexOf<S> operator/(const ComplexOf<S>& a, const ComplexOf<S>& b) {
  if (std::fabs(primal(b.re)) >= std::fabs(primal(b.im))) {
    S r = b.im / b.re;
    S den = b.re + b.im * r;
    return {(a.re + a.im * r) / den, (a.im - a.re * r) / den};
  }
  S r = b.re / b.im;
  S den = b.im + b.re * r;
  return {(a.re * r + a.im) / den, (a.im * r - a.re) / den};
}

/// Principal square root (branch cut on the negative real axis).
/// Uses the numerically stable half-angle formulas; each branch is smooth, so
/// dual tangents are exact wherever the primal square root is differentiable.
template <typename S>
ComplexOf<S> sqrt(const ComplexOf<S>& z) {
  using std::sqrt;
  S mag = sqrt(abs2(z));
  if (primal(mag) == 0.0) return {S(0.0), S(0.0)};
  if (primal(z.re) >= 0.0) {
    S w = sqrt((mag + z.re) * 0.5);
    return {w, z.im / (2.0 * w)};
  }
  S w = sqrt((mag - z.re) * 0.5);
  double sign = primal(z.im) >= 0.0 ? 1.0 : -1.0;
  return {(z.im * sign) / (2.0 * w), w * sign};
}

template <typename S>
bool is_finite(const ComplexOf<S>& z) {
  return is_finite(z.re) && is_finite(z.im);
}

}  // namespace smcmc
