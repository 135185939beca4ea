#include <doctest.h>

#include <cmath>
#include <complex>

#include "smcmc/complexof.hpp"
#include "smcmc/dual.hpp"

using namespace smcmc;

// Hand-derived reference values for f(x) = 3x^3 - 2x + 5 at x = 1.7:
//   f  = 3 * 4.913 - 3.4 + 5 = 16.339
//   f' = 9x^2 - 2            = 24.01
//   f''= 18x                 = 30.6
namespace {
template <typename S>
S poly(S x) {
  return 3.0 * x * x * x - 2.0 * x + 5.0;
}
}  // namespace

TEST_CASE("first-order dual propagates value and derivative exactly") {
  const Dual1 x = make_dual1(1.7, 1.0);
  const Dual1 y = poly(x);
  CHECK(primal(y) == doctest::Approx(16.339).epsilon(1e-15));
  CHECK(tangent(y) == doctest::Approx(24.01).epsilon(1e-15));
}

TEST_CASE("second-order dual carries value, both tangents, and the cross term") {
  const Dual2 x = make_dual2(1.7, 1.0, 1.0);
  const Dual2 y = poly(x);
  CHECK(primal(y) == doctest::Approx(16.339).epsilon(1e-15));
  CHECK(tangent1(y) == doctest::Approx(24.01).epsilon(1e-15));
  CHECK(tangent2(y) == doctest::Approx(24.01).epsilon(1e-15));
  CHECK(cross(y) == doctest::Approx(30.6).epsilon(1e-15));
}

TEST_CASE("two-variable cross derivative: f = x^2 y + y^3") {
  // df/dx = 2xy, df/dy = x^2 + 3y^2, d2f/dxdy = 2x. At (x, y) = (1.5, -0.5):
  // f = -1.25, fx = -1.5, fy = 3.0, fxy = 3.0.
  const Dual2 x = make_dual2(1.5, 1.0, 0.0);
  const Dual2 y = make_dual2(-0.5, 0.0, 1.0);
  const Dual2 f = x * x * y + y * y * y;
  CHECK(primal(f) == doctest::Approx(-1.25).epsilon(1e-15));
  CHECK(tangent1(f) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(tangent2(f) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(cross(f) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("division and transcendental chain rules match analytic derivatives") {
  // g(x) = sin(x) / x + exp(-x^2): g'(x) = (x cos x - sin x)/x^2 - 2x exp(-x^2).
  const double v = 0.8;
  const Dual1 x = make_dual1(v, 1.0);
  using std::sin, std::cos, std::exp;
  const Dual1 g = sin(x) / x + exp(-(x * x));
  const double expect = sin(v) / v + exp(-v * v);
  const double dexpect = (v * cos(v) - sin(v)) / (v * v) - 2.0 * v * exp(-v * v);
  CHECK(primal(g) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(tangent(g) == doctest::Approx(dexpect).epsilon(1e-14));
}

TEST_CASE("log and sqrt derivatives") {
  const Dual1 x = make_dual1(2.25, 1.0);
  using std::log, std::sqrt;
  CHECK(tangent(log(x)) == doctest::Approx(1.0 / 2.25).epsilon(1e-15));
  CHECK(tangent(sqrt(x)) == doctest::Approx(0.5 / 1.5).epsilon(1e-15));
  CHECK(primal(sqrt(x)) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("atan2 derivative matches d/dt atan2(y(t), x(t))") {
  // With y = t^2, x = 1 + t: d/dt atan2 = (y' x - x' y) / (x^2 + y^2) at t = 0.7.
  const double t = 0.7;
  const Dual1 td = make_dual1(t, 1.0);
  using std::atan2;
  const Dual1 r = atan2(td * td, 1.0 + td);
  const double y = t * t, x = 1.0 + t;
  const double expect = atan2(y, x);
  const double dexpect = (2.0 * t * x - y) / (x * x + y * y);
  CHECK(primal(r) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(tangent(r) == doctest::Approx(dexpect).epsilon(1e-14));
}

TEST_CASE("comparisons and branches act on the primal part") {
  const Dual1 a = make_dual1(1.0, 100.0);
  const Dual1 b = make_dual1(2.0, -100.0);
  CHECK(a < b);
  CHECK(b > a);
  CHECK(a == Dual1{1.0, 5.0});  // equality ignores the tangent
}

TEST_CASE("abs is the chain rule away from zero and zero-tangent at zero") {
  using std::abs;
  CHECK(tangent(abs(make_dual1(-3.0, 1.0))) == doctest::Approx(-1.0));
  CHECK(tangent(abs(make_dual1(3.0, 1.0))) == doctest::Approx(1.0));
  CHECK(tangent(abs(make_dual1(0.0, 1.0))) == 0.0);
}

TEST_CASE("constants lift into duals with zero tangent") {
  const Dual1 x = make_dual1(2.0, 1.0);
  const Dual1 y = x * 3.0 + 1.0;
  CHECK(primal(y) == doctest::Approx(7.0));
  CHECK(tangent(y) == doctest::Approx(3.0));
}

TEST_CASE("complex-of-dual matches std::complex on the primal path") {
  // Oracle: std::complex arithmetic on the primal parts.
  const std::complex<double> za(1.3, -0.7), zb(-0.4, 2.1);
  ComplexOf<Dual1> a{make_dual1(1.3, 1.0), make_dual1(-0.7, 0.0)};
  ComplexOf<Dual1> b{make_dual1(-0.4, 0.0), make_dual1(2.1, 0.0)};

  const auto prod = a * b;
  const auto quot = a / b;
  const auto expect_prod = za * zb;
  const auto expect_quot = za / zb;
  CHECK(primal(prod.re) == doctest::Approx(expect_prod.real()).epsilon(1e-15));
  CHECK(primal(prod.im) == doctest::Approx(expect_prod.imag()).epsilon(1e-15));
  CHECK(primal(quot.re) == doctest::Approx(expect_quot.real()).epsilon(1e-14));
  CHECK(primal(quot.im) == doctest::Approx(expect_quot.imag()).epsilon(1e-14));
}

TEST_CASE("complex division derivative: d/dt [1 / (t + i)] at t = 0.5") {
  // 1/(t+i) = (t - i) / (t^2 + 1); d/dt real = (1 - t^2)/(t^2+1)^2,
  // d/dt imag = 2t/(t^2+1)^2.
  const double t = 0.5;
  ComplexOf<Dual1> den{make_dual1(t, 1.0), make_dual1(1.0, 0.0)};
  ComplexOf<Dual1> one{Dual1{1.0}, Dual1{0.0}};
  const auto r = one / den;
  const double d = t * t + 1.0;
  CHECK(primal(r.re) == doctest::Approx(t / d).epsilon(1e-15));
  CHECK(primal(r.im) == doctest::Approx(-1.0 / d).epsilon(1e-15));
  CHECK(tangent(r.re) == doctest::Approx((1.0 - t * t) / (d * d)).epsilon(1e-14));
  CHECK(tangent(r.im) == doctest::Approx(2.0 * t / (d * d)).epsilon(1e-14));
}

TEST_CASE("complex sqrt agrees with std::sqrt on both branches") {
  const std::complex<double> cases[] = {{3.0, 4.0}, {3.0, -4.0}, {-3.0, 4.0}, {-3.0, -4.0},
                                        {-9.0, 1e-3}, {2.5, 0.0}};
  for (const auto& z : cases) {
    CAPTURE(z.real());
    CAPTURE(z.imag());
    const auto expect = std::sqrt(z);
    ComplexOf<double> w{z.real(), z.imag()};
    const auto got = sqrt(w);
    CHECK(got.re == doctest::Approx(expect.real()).epsilon(1e-14));
    CHECK(got.im == doctest::Approx(expect.imag()).epsilon(1e-14));
  }
}

TEST_CASE("abs2 and conj identities") {
  ComplexOf<double> z{3.0, -4.0};
  CHECK(abs2(z) == doctest::Approx(25.0));
  const auto zc = conj(z);
  CHECK(zc.im == doctest::Approx(4.0));
  const auto m = z * zc;
  CHECK(m.re == doctest::Approx(25.0));
  CHECK(m.im == doctest::Approx(0.0));
}

TEST_CASE("smith division stays finite where the naive formula overflows") {
  // denominator ~ 1e308: naive (re*re + im*im) overflows, Smith's scaling
  // must not.
  ComplexOf<double> num{1.0, 1.0};
  ComplexOf<double> den{1e308, 1e307};
  const auto q = num / den;
  CHECK(is_finite(q));
  const std::complex<double> expect = std::complex<double>(1.0, 1.0) /
                                      std::complex<double>(1e308, 1e307);
  CHECK(q.re == doctest::Approx(expect.real()).epsilon(1e-12));
  CHECK(q.im == doctest::Approx(expect.imag()).epsilon(1e-12));
}
