// Eigendecomposition of drift matrices: closed-form 2x2 values, residual
// identities for the iterative path, degeneracy guards, and dual-number
// sensitivities checked against perturbation theory.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "smcmc/eigs.hpp"
#include "smcmc/errors.hpp"

namespace {

using Cx = std::complex<double>;

Cx to_cx(const smcmc::ComplexOf<double>& z) { return {z.re, z.im}; }

// max_k |A r_k - lambda_k r_k| over all components, plus the left analog and
// the pairing identity L R = diag(c).
struct Residuals {
  double right = 0.0, left = 0.0, pairing = 0.0;
};

Residuals residuals(const smcmc::SquareMat<double>& a,
                    const smcmc::EigenDecomp<double>& d) {
  const int n = d.n;
  Residuals out;
  for (int k = 0; k < n; ++k) {
    const Cx lam = to_cx(d.lambda[k]);
    for (int i = 0; i < n; ++i) {
      Cx ar{};
      Cx la{};
      for (int j = 0; j < n; ++j) {
        ar += a(i, j) * to_cx(d.r(j, k));
        la += to_cx(d.l(k, j)) * a(j, i);
      }
      out.right = std::max(out.right, std::abs(ar - lam * to_cx(d.r(i, k))));
      out.left = std::max(out.left, std::abs(la - lam * to_cx(d.l(k, i))));
    }
    for (int m = 0; m < n; ++m) {
      Cx lr{};
      for (int j = 0; j < n; ++j) lr += to_cx(d.l(k, j)) * to_cx(d.r(j, m));
      const Cx expect = (k == m) ? to_cx(d.c[k]) : Cx{};
      out.pairing = std::max(out.pairing, std::abs(lr - expect));
    }
  }
  return out;
}

double norm_scale(const smcmc::SquareMat<double>& a) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) s = std::max(s, std::fabs(a(i, j)));
  return std::max(s, 1.0);
}

}  // namespace

TEST_CASE("diagonal 2x2 decomposes to identity factors") {
  smcmc::SquareMat<double> a(2);
  a(0, 0) = -1.0;
  a(0, 1) = 0.0;
  a(1, 0) = 0.0;
  a(1, 1) = -3.0;
  auto d = smcmc::eigen_decompose(a);
  REQUIRE(d.n == 2);
  std::vector<double> re = {d.lambda[0].re, d.lambda[1].re};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(re[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d.lambda[0].im == doctest::Approx(0.0).scale(1.0));
  auto res = residuals(a, d);
  CHECK(res.right <= 1e-12);
  CHECK(res.left <= 1e-12);
  CHECK(res.pairing <= 1e-12);
}

TEST_CASE("oscillator drift eigenvalues: conjugate pair at the damped frequency") {
  // A = [[0, 1], [-6400, -32]] (omega0 = 80, zeta = 0.2):
  //   lambda = -zeta omega0 +- i omega0 sqrt(1 - zeta^2)
  //          = -16 +- i 32 sqrt(6) = -16 +- 78.383671769061696 i
  smcmc::SquareMat<double> a(2);
  a(0, 0) = 0.0;
  a(0, 1) = 1.0;
  a(1, 0) = -6400.0;
  a(1, 1) = -32.0;
  auto d = smcmc::eigen_decompose(a);
  const int up = d.lambda[0].im > 0.0 ? 0 : 1;
  CHECK(d.lambda[up].re == doctest::Approx(-16.0).epsilon(1e-13));
  CHECK(d.lambda[up].im == doctest::Approx(78.383671769061696).epsilon(1e-13));
  CHECK(d.lambda[1 - up].re == doctest::Approx(-16.0).epsilon(1e-13));
  CHECK(d.lambda[1 - up].im == doctest::Approx(-78.383671769061696).epsilon(1e-13));

  auto res = residuals(a, d);
  const double scale = norm_scale(a);
  CHECK(res.right <= 1e-10 * scale);
  CHECK(res.left <= 1e-10 * scale);
  CHECK(res.pairing <= 1e-10 * scale);
  CHECK(smcmc::primal(abs2(d.c[0])) > 0.0);
  CHECK(smcmc::primal(abs2(d.c[1])) > 0.0);
}

TEST_CASE("3x3 path satisfies residual, trace, and determinant identities") {
  smcmc::SquareMat<double> a(3, {-1.0, 2.0, 0.0, 0.0, -3.0, 1.0, 0.5, 0.0, -2.0});
  auto d = smcmc::eigen_decompose(a);
  REQUIRE(d.n == 3);

  auto res = residuals(a, d);
  const double scale = norm_scale(a);
  CHECK(res.right <= 1e-10 * scale);
  CHECK(res.left <= 1e-10 * scale);
  CHECK(res.pairing <= 1e-10 * scale);

  // Sum lambda = trace = -6, product lambda = det = -5 (cofactor expansion:
  // -1 * 6 - 2 * (0 - 0.5) = -5).
  Cx sum{}, prod{1.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    sum += to_cx(d.lambda[k]);
    prod *= to_cx(d.lambda[k]);
  }
  CHECK(sum.real() == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(sum.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(prod.real() == doctest::Approx(-5.0).epsilon(1e-11));
  CHECK(prod.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-11));
}

TEST_CASE("repeated or defective spectra are rejected") {
  // Degeneracy surfaces mid-computation (often deep inside a sampling run),
  // so it is classified as a numerical failure, not a precondition one.
  smcmc::SquareMat<double> ident(2, {1.0, 0.0, 0.0, 1.0});
  CHECK_THROWS_AS(smcmc::eigen_decompose(ident), smcmc::NumericalError);

  // Jordan block: both eigenvalues zero.
  smcmc::SquareMat<double> jordan(2, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(smcmc::eigen_decompose(jordan), smcmc::NumericalError);

  // Relative spacing 1e-10 is below the 1e-8 degeneracy tolerance.
  smcmc::SquareMat<double> close(2, {-1.0, 0.0, 0.0, -1.0000000001});
  CHECK_THROWS_AS(smcmc::eigen_decompose(close), smcmc::NumericalError);

  // Comfortably separated spectrum passes.
  smcmc::SquareMat<double> ok(2, {-1.0, 0.0, 0.0, -1.01});
  CHECK_NOTHROW(smcmc::eigen_decompose(ok));
}

TEST_CASE("dual-scalar decomposition is limited to 2x2") {
  smcmc::SquareMat<smcmc::Dual1> a(3);
  for (int i = 0; i < 3; ++i) a(i, i) = smcmc::Dual1{-1.0 - i, 0.0};
  CHECK_THROWS_AS(smcmc::eigen_decompose(a), smcmc::PreconditionError);
}

TEST_CASE("dual 2x2 eigenvalues carry perturbation-theory sensitivities") {
  // Differentiate the oscillator pair in omega0 at (80, 0.2):
  //   d lambda / d omega0 = -zeta +- i sqrt(1 - zeta^2)
  //                       = -0.2 +- 0.9797958971132712 i
  // Seed: d a(1,0)/d omega0 = -2 omega0 = -160, d a(1,1)/d omega0 = -2 zeta = -0.4.
  smcmc::SquareMat<smcmc::Dual1> a(2);
  a(0, 0) = smcmc::Dual1{0.0, 0.0};
  a(0, 1) = smcmc::Dual1{1.0, 0.0};
  a(1, 0) = smcmc::Dual1{-6400.0, -160.0};
  a(1, 1) = smcmc::Dual1{-32.0, -0.4};
  auto d = smcmc::eigen_decompose(a);
  const int up = smcmc::primal(d.lambda[0].im) > 0.0 ? 0 : 1;
  CHECK(smcmc::primal(d.lambda[up].re) == doctest::Approx(-16.0));
  CHECK(smcmc::tangent(d.lambda[up].re) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(smcmc::tangent(d.lambda[up].im) ==
        doctest::Approx(0.9797958971132712).epsilon(1e-12));
  CHECK(smcmc::tangent(d.lambda[1 - up].im) ==
        doctest::Approx(-0.9797958971132712).epsilon(1e-12));
}
