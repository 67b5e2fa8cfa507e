#pragma once

#include <vector>

#include "spinres/types.hpp"

namespace spinres::signal {

enum class Window { rectangular, hann };

struct SpectrumEstimate {
  VecX frequency;  // cyclic frequency (cycles per unit time), bin centers
  VecX power;      // normalized so that sum(power) == mean square of windowed signal
  Window window = Window::hann;
  Eigen::Index n_samples = 0;
  Eigen::Index n_padded = 0;

  // Location of the strongest bin, refined by quadratic interpolation of
  // log-power on the three bins around the maximum.
  double peak_frequency() const;
};

// Windowed periodogram of a complex signal sampled uniformly with spacing dt.
// zero_pad multiplies the transform length (>= 1) for finer bin spacing.
SpectrumEstimate power_spectrum(const CVecX& samples, double dt,
                                Window window = Window::hann, int zero_pad = 1);
SpectrumEstimate power_spectrum(const VecX& samples, double dt,
                                Window window = Window::hann, int zero_pad = 1);

// Timestamped overload; rejects non-uniform sampling.
SpectrumEstimate power_spectrum(const VecX& samples, const VecX& times,
                                Window window = Window::hann, int zero_pad = 1);

struct Demodulation {
  double in_phase;    // I = (2/T) int x cos(w t) dt
  double quadrature;  // Q = (2/T) int x sin(w t) dt
  double phase;       // atan2(-Q, I): x = amplitude * cos(w t + phase)
  double amplitude;   // hypot(I, Q)
};

// Quadrature demodulation of x(t) against cos/sin at omega_ref. The window
// must span an integer number of reference periods (within `period_tol`
// relative) and at least `min_periods` of them.
Demodulation demodulate(const VecX& x, const VecX& t, double omega_ref,
                        double min_periods = 5.0, double period_tol = 1e-3);

struct FrequencyEstimate {
  double omega;          // angular frequency
  double standard_error; // fit standard error of the slope
};

// Oscillation frequency from a conjugate pair (phi, q) with phi' = omega*q:
// linear fit of the unwrapped angle atan2(q, phi). For that convention the
// angle advances at -omega, so the returned omega is the negated slope.
FrequencyEstimate instantaneous_frequency(const VecX& phi, const VecX& q,
                                          const VecX& t,
                                          double amplitude_floor = 1e-9);

struct Peak {
  Eigen::Index index;
  double position;    // sub-grid refined by quadratic fit
  double value;
  double prominence;  // height above the higher of the enclosing minima
};

// Local maxima of `values` on `grid` whose topographic prominence exceeds
// `prominence`. Returns peaks in grid order; empty list allowed.
std::vector<Peak> find_peaks(const VecX& values, const VecX& grid, double prominence);

// In-place phase unwrapping (adds multiples of 2*pi to keep increments in (-pi, pi]).
void unwrap(VecX& phase);

struct ToneFit {
  double omega;
  double cos_amp;
  double sin_amp;
  double residual;  // RMS residual of the fit
  double amplitude() const;
};

// Least-squares fit of x(t) ~ a cos(omega t) + b sin(omega t) with omega
// searched on [omega_lo, omega_hi] by golden-section on the residual.
ToneFit fit_single_tone(const VecX& x, const VecX& t, double omega_lo, double omega_hi);

}  // namespace spinres::signal
