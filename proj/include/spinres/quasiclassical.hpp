#pragma once

#include <string>
#include <vector>

#include "spinres/ode.hpp"
#include "spinres/types.hpp"

namespace spinres::quasiclassical {

enum class DriveMode { fm_drive, resonator_drive };

// Drive configuration for the adiabatic spin reversals. In fm_drive mode the
// ac frequency is modulated with depth Omega at the resonator frequency; in
// resonator_drive mode Omega = 0 and the reversals come from the resonator
// started at amplitude A.
struct ReversalDrive {
  DriveMode mode = DriveMode::fm_drive;
  double modulation_depth = 0.0;     // Omega
  double resonator_frequency = 0.0;  // omega_r
  double rabi_frequency = 0.0;       // omega_R
  double initial_amplitude = 0.0;    // A (resonator_drive only)

  void validate() const;
};

// Spin (Sx,Sy,Sz) plus resonator point (flux, charge); flat ODE layout
// [Sx, Sy, Sz, phi, q].
struct QcState {
  Vec3 spin = Vec3::Zero();
  double flux = 0.0;
  double charge = 0.0;

  VecX to_vector() const;
  static QcState from_vector(const VecX& y);
};

struct QcParams {
  ReversalDrive drive;
  double coupling = 0.0;       // Lambda = lambda cos(alpha)
  double drive_coupling = 0.0; // lambda'; absorbed into the equilibrium shift

  // Flux offset removed before integration: phi_eq = -sqrt2 lambda'/omega_r.
  double equilibrium_shift() const;
};

// Rotating-frame field on the spin: (0, omega_R, Omega cos(w_r t) - 2 sqrt2 Lambda phi).
Vec3 effective_field(double t, double flux, const ReversalDrive& drive, double coupling);

// S' = S x B; phi' = w_r q; q' = -w_r phi - 2 sqrt2 Lambda Sz.
void eom_rhs(double t, const QcState& state, const QcParams& params, QcState& deriv);

// Spin locked (anti-)parallel to the field: +-(1/2) B/|B|.
Vec3 adiabatic_spin(const Vec3& field, QubitBranch branch);

// Integrates the spin-resonator equations with dense output at sample_times;
// checks that the spin norm drifts by less than 10 * rel_tol.
Trajectory integrate(const QcParams& params, const QcState& initial,
                     std::pair<double, double> t_span, const VecX& sample_times,
                     double rel_tol = 1e-9);

// One recorded regime inequality "a >> b": ratio = a/b, pass needs ratio >= required.
struct RegimeMargin {
  std::string name;
  double ratio = 0.0;
  double required = 10.0;
  bool ok() const { return ratio >= required; }
};

struct PhaseReadoutConfig {
  double omega_R = 1.0;
  double Omega = 10.0;
  double omega_r = 0.005;
  double coupling = 1e-3;       // Lambda
  double drive_coupling = 0.0;  // lambda'
  QubitBranch state = QubitBranch::ground;
  int n_periods = 20;
  int samples_per_period = 256;
  double rel_tol = 1e-9;
  double gg_factor = 10.0;  // ">>" is read as ratio >= gg_factor
};

struct PhaseReadoutResult {
  Trajectory trajectory;
  double phase_estimate = 0.0;   // phase of phi_r relative to the FM waveform
  double amplitude_slope = 0.0;  // growth rate of the per-period envelope
  double demod_amplitude = 0.0;
  double adiabaticity = 0.0;     // analytic peak theta_dot / |B|
  std::vector<RegimeMargin> margins;
};

// Drive-phase protocol: spin starts (anti-)aligned with B(0), resonator at
// rest; the driven flux oscillation is demodulated over the final third of
// the run. Ground gives -pi/2, excited +pi/2.
PhaseReadoutResult run_phase_readout(const PhaseReadoutConfig& config);

struct FrequencyReadoutConfig {
  double omega_R = 1.0;
  double coupling = 0.3;  // Lambda
  double amplitude = 20.0;
  double omega_r = 0.03;
  double drive_coupling = 0.0;
  QubitBranch state = QubitBranch::ground;
  int n_periods = 30;
  int samples_per_period = 256;
  double rel_tol = 1e-9;
  double gg_factor = 10.0;
};

struct FrequencyReadoutResult {
  Trajectory trajectory;
  double measured_omega = 0.0;
  double measured_stderr = 0.0;
  double delta_omega = 0.0;      // measured_omega - omega_r (negative for ground)
  double predicted_leading = 0.0;   // -+ Lambda / A
  double predicted_refined = 0.0;   // averaged_frequency_shift
  double adiabaticity = 0.0;
  std::vector<RegimeMargin> margins;
};

// Frequency-shift protocol: resonator starts at phi = -A, the spin reversal
// back-action pulls the oscillation frequency by -+ 2 sqrt2 Lambda / (pi A).
FrequencyReadoutResult run_frequency_readout(const FrequencyReadoutConfig& config);

// First-order averaged phase-drift coefficient Q(a) of the reversal force,
// expressed through complete elliptic integrals.
double phase_drift_Q(double amplitude, double coupling, double omega_R);

// Averaged frequency shift (measured minus bare): ground negative, excited
// positive; tends to -+ 2 sqrt2 Lambda / (pi A) as the reversal field dominates.
double averaged_frequency_shift(double coupling, double amplitude, double omega_R,
                                double omega_r, QubitBranch branch);

// Analytic peak of (polar-angle rate)/(precession frequency) over a cycle:
// fm drive: w_r Omega / w_R^2; resonator drive: 2 sqrt2 Lambda w_r A / w_R^2.
double adiabaticity_margin(const ReversalDrive& drive, double coupling);

// The same ratio measured along an integrated trajectory by differencing the
// field polar angle between samples.
double adiabaticity_margin_numeric(const Trajectory& traj, const QcParams& params);

}  // namespace spinres::quasiclassical
