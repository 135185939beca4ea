#pragma once

#include <cmath>

namespace smcmc {

/// Forward-mode dual number: value `v` plus derivative coefficient `d`.
///
/// Nesting one level (Dual<Dual<double>>) propagates second-order terms by
/// tangent-over-tangent composition: seeding direction i on the outer level
/// and direction j on the inner level makes the inner-most coefficient of the
/// result equal d2f/(dtheta_i dtheta_j). All comparisons and branch decisions
/// use the primal value only, so control flow matches a plain-double run.
template <typename T>
struct Dual {
  T v{};  // value
  T d{};  // derivative coefficient

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d() {}  // constants lift with zero tangent
  constexpr Dual(T value, T deriv) : v(value), d(deriv) {}
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

inline constexpr double primal(double x) { return x; }
template <typename T>
constexpr double primal(const Dual<T>& x) {
  return primal(x.v);
}

inline constexpr double tangent(const Dual1& x) { return x.d; }

// Second-order accessors: f + t1*e1 + t2*e2 + cross*e1*e2 with e1*e1 = e2*e2 = 0.
inline constexpr double tangent1(const Dual2& x) { return x.d.v; }
inline constexpr double tangent2(const Dual2& x) { return x.v.d; }
inline constexpr double cross(const Dual2& x) { return x.d.d; }

inline constexpr Dual1 make_dual1(double value, double seed) { return {value, seed}; }
inline constexpr Dual2 make_dual2(double value, double seed1, double seed2) {
  return {Dual1{value, seed2}, Dual1{seed1, 0.0}};
}

// ---- arithmetic -----------------------------------------------------------

template <typename T>
constexpr Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <typename T>
constexpr Dual<T> operator+(const Dual<T>& a) {
  return a;
}

template <typename T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <typename T>
constexpr Dual<T> operator+(const Dual<T>& a, double b) {
  return {a.v + b, a.d};
}
template <typename T>
constexpr Dual<T> operator+(double a, const Dual<T>& b) {
  return {a + b.v, b.d};
}

template <typename T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <typename T>
constexpr Dual<T> operator-(const Dual<T>& a, double b) {
  return {a.v - b, a.d};
}
template <typename T>
constexpr Dual<T> operator-(double a, const Dual<T>& b) {
  return {a - b.v, -b.d};
}

template <typename T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <typename T>
constexpr Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.v * b, a.d * b};
}
template <typename T>
constexpr Dual<T> operator*(double a, const Dual<T>& b) {
  return {a * b.v, a * b.d};
}

template <typename T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}
template <typename T>
constexpr Dual<T> operator/(const Dual<T>& a, double b) {
  return {a.v / b, a.d / b};
}
template <typename T>
constexpr Dual<T> operator/(double a, const Dual<T>& b) {
  T q = a / b.v;
  return {q, (-q * b.d) / b.v};
}

template <typename T>
constexpr Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  a.v = a.v + b.v;
  a.d = a.d + b.d;
  return a;
}
template <typename T>
constexpr Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  a.v = a.v - b.v;
  a.d = a.d - b.d;
  return a;
}
template <typename T>
constexpr Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  a = a * b;
  return a;
}

// ---- comparisons (primal only) --------------------------------------------

template <typename T>
constexpr bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) < primal(b);
}
template <typename T>
constexpr bool operator<(const Dual<T>& a, double b) {
  return primal(a) < b;
}
template <typename T>
constexpr bool operator<(double a, const Dual<T>& b) {
  return a < primal(b);
}
template <typename T>
constexpr bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) > primal(b);
}
template <typename T>
constexpr bool operator>(const Dual<T>& a, double b) {
  return primal(a) > b;
}
template <typename T>
constexpr bool operator>(double a, const Dual<T>& b) {
  return a > primal(b);
}
template <typename T>
constexpr bool operator<=(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) <= primal(b);
}
template <typename T>
constexpr bool operator>=(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) >= primal(b);
}
template <typename T>
constexpr bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) == primal(b);
}
template <typename T>
constexpr bool operator!=(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) != primal(b);
}

// ---- elementary functions --------------------------------------------------

template <typename T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T r = sqrt(x.v);
  return {r, x.d / (2.0 * r)};
}

template <typename T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = exp(x.v);
  return {e, x.d * e};
}

template <typename T>
Dual<T> log(const Dual<T>& x) {
  using std::log;
  return {log(x.v), x.d / x.v};
}

template <typename T>
Dual<T> sin(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {sin(x.v), x.d * cos(x.v)};
}

template <typename T>
Dual<T> cos(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return {cos(x.v), -(x.d * sin(x.v))};
}

template <typename T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  T denom = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / denom};
}

/// Subgradient convention: derivative 0 exactly at a primal value of 0.
template <typename T>
Dual<T> abs(const Dual<T>& x) {
  double p = primal(x.v);
  double s = p > 0.0 ? 1.0 : (p < 0.0 ? -1.0 : 0.0);
  return {s == 0.0 ? T{} : x.v * s, x.d * s};
}

template <typename T>
Dual<T> fabs(const Dual<T>& x) {
  return abs(x);
}

inline bool is_finite(double x) { return std::isfinite(x); }
template <typename T>
bool is_finite(const Dual<T>& x) {
  return is_finite(x.v) && is_finite(x.d);
}

}  // namespace smcmc
