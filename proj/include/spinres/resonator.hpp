#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "spinres/errors.hpp"
#include "spinres/types.hpp"

namespace spinres::resonator {

template <typename Scalar = Real>
struct CoherentStateT {
  std::complex<Scalar> amplitude;

  Scalar mean_photon_number() const { return std::norm(amplitude); }
};
using CoherentState = CoherentStateT<>;

// Effective nonlinear-oscillator constants, one set per qubit branch.
struct NonlinearOscParams {
  double base_frequency = 0.0;             // renormalized omega_r
  double nonlinearity = 0.0;               // mu (angular frequency)
  double constant_offset = 0.0;            // zeta
  QubitBranch branch = QubitBranch::ground;

  double dimensionless_nonlinearity() const {  // mu_bar = mu / omega_r (hbar = 1)
    return nonlinearity / base_frequency;
  }
  // classical nonlinearity mu_cl = mu J / omega_r with action J = |alpha|^2
  double classical_nonlinearity(double mean_photons) const {
    return nonlinearity * mean_photons / base_frequency;
  }
};

// Dimensionless time scales (units of 1/omega_r).
struct TimeScales {
  double classical_period;    // tau_cl = 2 pi / (1 + 2 mu_cl)
  double quantum_departure;   // tau_h  = 1 / (2 mu_bar sqrt(nbar))
  double revival_time;        // tau_R  = pi / mu_bar
};

// Closed-form <a>(tau) of the Kerr oscillator started in a coherent state:
// alpha e^{-i(1+mu_bar) tau} exp{ |alpha|^2 [e^{-2 i mu_bar tau} - 1] }.
inline Complex coherent_amplitude(Complex alpha, double mu_bar, double tau) {
  const Complex i(0.0, 1.0);
  return alpha * std::exp(-i * (1.0 + mu_bar) * tau) *
         std::exp(std::norm(alpha) * (std::exp(-2.0 * i * mu_bar * tau) - 1.0));
}

// Relative deviation of |<a>(tau)| from the Gaussian envelope
// |alpha| e^{-tau^2 / (2 tau_h^2)}. Valid only while mu_bar * tau << 1.
inline double gaussian_envelope_check(Complex alpha, double mu_bar, double tau) {
  if (mu_bar * tau >= 0.3) {
    throw ValidationError("gaussian_envelope_check: outside regime mu_bar*tau < 0.3");
  }
  const double nbar = std::norm(alpha);
  const double tau_h = 1.0 / (2.0 * mu_bar * std::sqrt(nbar));
  const double envelope = std::abs(alpha) * std::exp(-tau * tau / (2.0 * tau_h * tau_h));
  return std::abs(std::abs(coherent_amplitude(alpha, mu_bar, tau)) - envelope) /
         std::abs(alpha);
}

inline TimeScales time_scales(Complex alpha, double mu_bar, double mu_cl) {
  const double nbar = std::norm(alpha);
  if (!(nbar > 0.0)) throw ValidationError("time_scales: need |alpha| > 0");
  if (mu_bar < 0.0) throw ValidationError("time_scales: mu_bar must be >= 0");
  const double inf = std::numeric_limits<double>::infinity();
  TimeScales out;
  out.classical_period = 2.0 * M_PI / (1.0 + 2.0 * mu_cl);
  out.quantum_departure = mu_bar == 0.0 ? inf : 1.0 / (2.0 * mu_bar * std::sqrt(nbar));
  out.revival_time = mu_bar == 0.0 ? inf : M_PI / mu_bar;
  return out;
}

struct QuantumQuality {
  double line_width;      // Delta nu_h = 2 sqrt(2) / tau_h
  double quality_factor;  // Q_h = 1 / Delta nu_h
};

inline QuantumQuality quantum_quality(double tau_h) {
  if (!(tau_h > 0.0)) throw ValidationError("quantum_quality: tau_h must be positive");
  const double width = 2.0 * std::sqrt(2.0) / tau_h;
  return {width, 1.0 / width};
}

// Flux-representation coherent-state wavefunction sampled on `grid`:
// u_alpha(phi) = pi^{-1/4} exp[-(phi/sqrt2 - alpha)^2 + (alpha^2 - |alpha|^2)/2].
// The grid must cover |phi/sqrt2 - Re alpha| <= 6 on both sides; the samples
// are checked to integrate to 1 within `norm_tol`.
CVecX flux_wavefunction(Complex alpha, const VecX& grid, double norm_tol = 1e-6);

}  // namespace spinres::resonator
