#include <doctest.h>

#include <cmath>

#include "spinres/errors.hpp"
#include "spinres/fock.hpp"
#include "spinres/resonator.hpp"
#include "spinres/signal.hpp"

using namespace spinres;
using namespace spinres::resonator;

namespace {

// Brute-force oracle: <alpha| a(tau) |alpha> as the truncated Fock sum
// alpha e^{-i tau (1+mu_bar)} sum_n e^{-nbar} nbar^n/n! e^{-2 i mu_bar n tau}.
Complex fock_sum_amplitude(Complex alpha, double mu_bar, double tau) {
  const double nbar = std::norm(alpha);
  const int n_max = fock::default_n_max(nbar);
  Complex acc = 0.0;
  double p = std::exp(-nbar);
  for (int n = 0; n <= n_max; ++n) {
    acc += p * std::exp(Complex(0.0, -2.0 * mu_bar * n * tau));
    p *= nbar / (n + 1.0);
  }
  return alpha * std::exp(Complex(0.0, -(1.0 + mu_bar) * tau)) * acc;
}

VecX linspace(double a, double b, int n) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1.0);
  return v;
}

}  // namespace

TEST_CASE("coherent_amplitude: limits") {
  const Complex a(3.0, -1.0);
  CHECK(std::abs(coherent_amplitude(a, 0.01, 0.0) - a) < 1e-15);
  // linear oscillator: pure phase rotation
  for (double tau : {0.5, 3.0, 20.0}) {
    const Complex v = coherent_amplitude(a, 0.0, tau);
    CHECK(std::abs(v) == doctest::Approx(std::abs(a)).epsilon(1e-14));
    CHECK(std::abs(v - a * std::exp(Complex(0.0, -tau))) < 1e-12);
  }
}

TEST_CASE("coherent_amplitude matches the Fock-sum oracle to 1e-10") {
  const Complex alpha(10.0, 0.0);
  const double mu_bar = 1e-3;
  for (double tau = 0.0; tau <= 50.0; tau += 2.5) {
    const Complex closed = coherent_amplitude(alpha, mu_bar, tau);
    const Complex oracle = fock_sum_amplitude(alpha, mu_bar, tau);
    CHECK(std::abs(closed - oracle) < 1e-10);
  }
}

TEST_CASE("coherent_amplitude: envelope bound and revival periodicity") {
  const Complex alpha(4.0, 2.0);
  const double mu_bar = 3e-3;
  const double tau_R = M_PI / mu_bar;
  for (double tau : {0.3, 7.0, 100.0, 1000.0, 2500.0}) {
    CHECK(std::abs(coherent_amplitude(alpha, mu_bar, tau)) <= std::abs(alpha) + 1e-12);
    const double e1 = std::abs(coherent_amplitude(alpha, mu_bar, tau));
    const double e2 = std::abs(coherent_amplitude(alpha, mu_bar, tau + tau_R));
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
  }
  // full revival at tau_R
  CHECK(std::abs(coherent_amplitude(alpha, mu_bar, tau_R)) ==
        doctest::Approx(std::abs(alpha)).epsilon(1e-12));
}

TEST_CASE("gaussian_envelope_check") {
  const Complex alpha(10.0, 0.0);  // nbar = 100
  const double mu_bar = 1e-3;
  CHECK(gaussian_envelope_check(alpha, mu_bar, 0.0) == doctest::Approx(0.0));
  const double tau_h = 1.0 / (2.0 * mu_bar * 10.0);
  CHECK(gaussian_envelope_check(alpha, mu_bar, tau_h) < 0.05);
  // the correction factor relative to the envelope grows monotonically
  double prev = 0.0;
  for (double tau : {20.0, 60.0, 120.0, 200.0}) {
    const double envelope = std::exp(-tau * tau / (2.0 * tau_h * tau_h));
    const double rel = gaussian_envelope_check(alpha, mu_bar, tau) / envelope;
    CHECK(rel >= prev - 1e-12);
    prev = rel;
  }
  CHECK_THROWS_AS(gaussian_envelope_check(alpha, mu_bar, 301.0), ValidationError);
}

TEST_CASE("time_scales") {
  const Complex alpha(10.0, 0.0);
  auto ts = time_scales(alpha, 0.01, 0.0);
  CHECK(ts.quantum_departure == doctest::Approx(5.0));
  CHECK(ts.revival_time == doctest::Approx(100.0 * M_PI));
  CHECK(ts.classical_period == doctest::Approx(2.0 * M_PI));
  // tau_R / tau_h = 2 pi sqrt(nbar) >> 1
  CHECK(ts.revival_time / ts.quantum_departure ==
        doctest::Approx(2.0 * M_PI * 10.0).epsilon(1e-12));
  // mu_bar = 0: infinite scales reported explicitly
  ts = time_scales(alpha, 0.0, 0.0);
  CHECK(std::isinf(ts.quantum_departure));
  CHECK(std::isinf(ts.revival_time));
}

TEST_CASE("quantum_quality") {
  auto q = quantum_quality(2.0 * std::sqrt(2.0));
  CHECK(q.line_width == doctest::Approx(1.0));
  CHECK(q.quality_factor == doctest::Approx(1.0));
  const auto q2 = quantum_quality(4.0 * std::sqrt(2.0));
  CHECK(q2.line_width == doctest::Approx(0.5));
}

TEST_CASE("spectral width of the closed form matches 2 sqrt2 / tau_h within 1.5x") {
  const Complex alpha(10.0, 0.0);
  const double mu_bar = 1e-3;
  const double tau_h = 1.0 / (2.0 * mu_bar * 10.0);  // 50
  const int n = 1 << 13;
  // centered window of length 4 tau_h around the envelope maximum
  const double dt = 4.0 * tau_h / n;
  CVecX sig(n);
  for (int i = 0; i < n; ++i) {
    sig[i] = coherent_amplitude(alpha, mu_bar, -2.0 * tau_h + i * dt);
  }
  const auto spec = signal::power_spectrum(sig, dt, signal::Window::rectangular, 16);
  VecX mag = spec.power.cwiseSqrt();
  Eigen::Index ipk = 0;
  mag.maxCoeff(&ipk);
  const double thr = mag[ipk] / std::exp(1.0);
  Eigen::Index lo = ipk, hi = ipk;
  while (lo > 0 && mag[lo - 1] >= thr) --lo;
  while (hi + 1 < mag.size() && mag[hi + 1] >= thr) ++hi;
  const double width = 2.0 * M_PI * std::abs(spec.frequency[hi] - spec.frequency[lo]);
  const double predicted = 2.0 * std::sqrt(2.0) / tau_h;
  CHECK(width / predicted > 1.0 / 1.5);
  CHECK(width / predicted < 1.5);
}

TEST_CASE("flux_wavefunction: ground state, moments, normalization") {
  VecX grid = linspace(-12.0, 12.0, 2401);
  // alpha = 0: ground-state gaussian
  const CVecX u0 = flux_wavefunction(0.0, grid);
  for (Eigen::Index i = 0; i < grid.size(); i += 100) {
    const double expect = std::pow(M_PI, -0.25) * std::exp(-0.5 * grid[i] * grid[i]);
    CHECK(std::abs(u0[i] - Complex(expect, 0.0)) < 1e-12);
  }
  // complex alpha: <phi> = sqrt2 Re alpha, <q> = sqrt2 Im alpha via quadrature
  const Complex alpha(1.3, -0.8);
  const CVecX u = flux_wavefunction(alpha, grid);
  const double h = grid[1] - grid[0];
  double mean_phi = 0.0;
  Complex mean_q = 0.0;
  for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
    mean_phi += grid[i] * std::norm(u[i]) * h;
    const Complex du = (u[i + 1] - u[i - 1]) / (2.0 * h);
    mean_q += std::conj(u[i]) * Complex(0.0, -1.0) * du * h;
  }
  CHECK(mean_phi == doctest::Approx(std::sqrt(2.0) * alpha.real()).epsilon(1e-6));
  CHECK(mean_q.real() == doctest::Approx(std::sqrt(2.0) * alpha.imag()).epsilon(1e-3));
  CHECK(std::abs(mean_q.imag()) < 1e-8);
  // narrow grid: normalization failure reported
  VecX narrow = linspace(-3.0, 3.0, 400);
  CHECK_THROWS_AS(flux_wavefunction(0.0, narrow), ValidationError);
}
