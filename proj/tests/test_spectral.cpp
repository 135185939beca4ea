// Spectral density via the eigendecomposed resolvent, checked against the
// oscillator's closed-form transfer function, and the spectral log likelihood
// checked against a naive independent reimplementation.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "smcmc/errors.hpp"
#include "smcmc/model.hpp"
#include "smcmc/periodogram.hpp"
#include "smcmc/spectral.hpp"

namespace {

// Closed form for dX0 = X1 dt, dX1 = (-w0^2 X0 - 2 z w0 X1) dt + input:
//   T_{01}(i w) = 1 / (w0^2 - w^2 + 2 i z w0 w)
//   f(w) = sigma_in^2 / ((w0^2 - w^2)^2 + 4 z^2 w0^2 w^2) + sigma_obs^2 dt
double oscillator_psd(double w, double w0, double z, double sig_in, double sig_obs,
                      double dt) {
  const double a = w0 * w0 - w * w;
  const double b = 2.0 * z * w0 * w;
  return sig_in * sig_in / (a * a + b * b) + sig_obs * sig_obs * dt;
}

const std::vector<double> kFlat = {80.0, 40.0, 100.0, 10.0, 0.2};

}  // namespace

TEST_CASE("resonance peak value matches the closed form exactly") {
  // At w = w0 = 80, z = 0.2, sigma_in = 100: |T|^2 = 1 / (4 z^2 w0^4)
  //   = 1 / 6553600, so f = 10^4 / 6553600 + 0.05^2 * 0.01
  //   = 0.00152587890625 + 2.5e-5 = 0.00155087890625.
  smcmc::HarmonicOscillatorModel model(0.05, 0.01);
  smcmc::ParamSpec spec = smcmc::default_oscillator_spec(2);
  const double f = smcmc::spectral_density<double>(model, std::span<const double>(kFlat),
                                                   spec, 0, 80.0);
  CHECK(f == doctest::Approx(0.00155087890625).epsilon(1e-12));
}

TEST_CASE("eigen-resolvent density equals the direct transfer function on a grid") {
  smcmc::HarmonicOscillatorModel model(0.05, 0.01);
  smcmc::ParamSpec spec = smcmc::default_oscillator_spec(2);
  std::vector<double> omegas = {0.0, 1.0, 10.0, 40.0, 78.383671769061696,
                                80.0, 120.0, 200.0, 314.159};
  for (int cond = 0; cond < 2; ++cond) {
    const double w0 = kFlat[cond];
    const double sig_in = kFlat[2 + cond];
    for (double w : omegas) {
      const double got =
          smcmc::spectral_density<double>(model, std::span<const double>(kFlat), spec, cond, w);
      const double want = oscillator_psd(w, w0, 0.2, sig_in, 0.05, 0.01);
      CHECK(std::fabs(got - want) / want <= 1e-9);
    }
  }
}

TEST_CASE("heavily damped corner of the box also matches the closed form") {
  smcmc::HarmonicOscillatorModel model(0.3, 0.02);
  smcmc::ParamSpec spec = smcmc::default_oscillator_spec(1);
  const std::vector<double> flat = {5.0, 0.5, 0.9};  // w0, sigma_in, zeta
  for (double w : {0.0, 2.0, 5.0, 9.0, 30.0}) {
    const double got =
        smcmc::spectral_density<double>(model, std::span<const double>(flat), spec, 0, w);
    const double want = oscillator_psd(w, 5.0, 0.9, 0.5, 0.3, 0.02);
    CHECK(std::fabs(got - want) / want <= 1e-9);
  }
}

TEST_CASE("spectral log likelihood equals a naive reimplementation") {
  smcmc::HarmonicOscillatorModel model(0.05, 0.01);
  smcmc::ParamSpec spec = smcmc::default_oscillator_spec(2);

  // Hand-made spectra: arbitrary positive ordinates at arbitrary frequencies.
  smcmc::SpectralData d0, d1;
  d0.omega = {3.0, 17.0, 52.5, 79.5, 81.0, 140.0};
  d0.s = {2e-3, 1.5e-3, 4e-4, 2.1e-3, 1.9e-3, 1e-5};
  d0.delta_t = 0.01;
  d0.n_samples = 14;
  d1.omega = {5.0, 38.0, 41.0, 90.0};
  d1.s = {6e-4, 9e-4, 8.5e-4, 3e-6};
  d1.delta_t = 0.01;
  d1.n_samples = 10;
  std::vector<smcmc::SpectralData> data = {d0, d1};

  long double want = 0.0L;
  for (int cond = 0; cond < 2; ++cond) {
    const auto& sd = data[cond];
    for (std::size_t k = 0; k < sd.omega.size(); ++k) {
      const long double f =
          oscillator_psd(sd.omega[k], kFlat[cond], 0.2, kFlat[2 + cond], 0.05, 0.01);
      want += -std::log(static_cast<double>(f)) - sd.s[k] / f;
    }
  }

  const double got = smcmc::whittle_loglik<double>(model, std::span<const double>(kFlat),
                                                   spec, data);
  CHECK(got == doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
}

TEST_CASE("out-of-support parameters give -inf without throwing") {
  smcmc::HarmonicOscillatorModel model(0.05, 0.01);
  smcmc::ParamSpec spec = smcmc::default_oscillator_spec(2);
  smcmc::SpectralData d;
  d.omega = {10.0};
  d.s = {1e-3};
  d.delta_t = 0.01;
  d.n_samples = 4;
  std::vector<smcmc::SpectralData> data = {d, d};

  std::vector<double> bad = kFlat;
  bad[4] = 0.999;  // above the zeta box
  const double v =
      smcmc::whittle_loglik<double>(model, std::span<const double>(bad), spec, data);
  CHECK(std::isinf(v));
  CHECK(v < 0.0);

  bad = kFlat;
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK(std::isinf(
      smcmc::whittle_loglik<double>(model, std::span<const double>(bad), spec, data)));
}

TEST_CASE("mismatched sampling interval or condition count is rejected") {
  smcmc::HarmonicOscillatorModel model(0.05, 0.01);
  smcmc::ParamSpec spec = smcmc::default_oscillator_spec(2);
  smcmc::SpectralData d;
  d.omega = {10.0};
  d.s = {1e-3};
  d.delta_t = 0.01;
  d.n_samples = 4;

  std::vector<smcmc::SpectralData> one = {d};
  CHECK_THROWS_AS(
      smcmc::whittle_loglik<double>(model, std::span<const double>(kFlat), spec, one),
      smcmc::PreconditionError);

  smcmc::SpectralData wrong = d;
  wrong.delta_t = 0.02;
  std::vector<smcmc::SpectralData> data = {d, wrong};
  CHECK_THROWS_AS(
      smcmc::whittle_loglik<double>(model, std::span<const double>(kFlat), spec, data),
      smcmc::PreconditionError);
}

TEST_CASE("transfer element validates indices") {
  smcmc::SquareMat<double> a(2, {0.0, 1.0, -6400.0, -32.0});
  auto d = smcmc::eigen_decompose(a);
  CHECK_THROWS_AS(smcmc::transfer_element(d, 1.0, 0, 2), smcmc::PreconditionError);
  CHECK_THROWS_AS(smcmc::transfer_element(d, 1.0, -1, 0), smcmc::PreconditionError);
}

TEST_CASE("dual spectral density tangent agrees with a central difference") {
  smcmc::HarmonicOscillatorModel model(0.05, 0.01);
  smcmc::ParamSpec spec = smcmc::default_oscillator_spec(2);
  const double w = 60.0;

  std::vector<smcmc::Dual1> dual_flat(5);
  for (int i = 0; i < 5; ++i) dual_flat[i] = smcmc::Dual1{kFlat[i], 0.0};
  dual_flat[0].d = 1.0;  // d/d omega0(c1)
  const smcmc::Dual1 fd =
      smcmc::spectral_density<smcmc::Dual1>(model, std::span<const smcmc::Dual1>(dual_flat),
                                            spec, 0, w);

  const double h = 1e-5 * 80.0;
  std::vector<double> plus = kFlat, minus = kFlat;
  plus[0] += h;
  minus[0] -= h;
  const double num =
      (smcmc::spectral_density<double>(model, std::span<const double>(plus), spec, 0, w) -
       smcmc::spectral_density<double>(model, std::span<const double>(minus), spec, 0, w)) /
      (2.0 * h);
  CHECK(smcmc::tangent(fd) == doctest::Approx(num).epsilon(1e-6));
}
