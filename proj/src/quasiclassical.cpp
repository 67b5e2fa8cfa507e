#include "spinres/quasiclassical.hpp"

#include <algorithm>
#include <cmath>

#include "spinres/elliptic.hpp"
#include "spinres/errors.hpp"
#include "spinres/signal.hpp"

namespace spinres::quasiclassical {

namespace {
constexpr double kRoot2 = 1.4142135623730951;

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}
}  // namespace

void ReversalDrive::validate() const {
  if (!(resonator_frequency > 0.0) || !(rabi_frequency > 0.0)) {
    throw ValidationError("ReversalDrive: omega_r and omega_R must be positive");
  }
  if (mode == DriveMode::fm_drive) {
    if (!(modulation_depth > 0.0)) {
      throw ValidationError("ReversalDrive: fm drive requires Omega > 0");
    }
  } else {
    if (modulation_depth != 0.0) {
      throw ValidationError("ReversalDrive: resonator drive requires Omega = 0");
    }
    if (!(initial_amplitude > 0.0)) {
      throw ValidationError("ReversalDrive: resonator drive requires A > 0");
    }
  }
}

VecX QcState::to_vector() const {
  VecX y(5);
  y << spin[0], spin[1], spin[2], flux, charge;
  return y;
}

QcState QcState::from_vector(const VecX& y) {
  QcState s;
  s.spin << y[0], y[1], y[2];
  s.flux = y[3];
  s.charge = y[4];
  return s;
}

double QcParams::equilibrium_shift() const {
  return -kRoot2 * drive_coupling / drive.resonator_frequency;
}

Vec3 effective_field(double t, double flux, const ReversalDrive& drive, double coupling) {
  return Vec3(0.0,
              drive.rabi_frequency,
              drive.modulation_depth * std::cos(drive.resonator_frequency * t) -
                  2.0 * kRoot2 * coupling * flux);
}

void eom_rhs(double t, const QcState& state, const QcParams& params, QcState& deriv) {
  const Vec3 b = effective_field(t, state.flux, params.drive, params.coupling);
  deriv.spin = state.spin.cross(b);
  const double wr = params.drive.resonator_frequency;
  deriv.flux = wr * state.charge;
  deriv.charge = -wr * state.flux - 2.0 * kRoot2 * params.coupling * state.spin[2];
}

Vec3 adiabatic_spin(const Vec3& field, QubitBranch branch) {
  const double b = field.norm();
  if (!(b > 0.0)) throw ValidationError("adiabatic_spin: |B| = 0");
  return branch_sign(branch) * 0.5 * field / b;
}

Trajectory integrate(const QcParams& params, const QcState& initial,
                     std::pair<double, double> t_span, const VecX& sample_times,
                     double rel_tol) {
  if (!(rel_tol > 0.0)) throw ValidationError("integrate: tol must be positive");
  params.drive.validate();
  auto rhs = [&params](double t, const VecX& y, VecX& dy) {
    QcState s = QcState::from_vector(y);
    QcState d;
    eom_rhs(t, s, params, d);
    dy.resize(5);
    dy << d.spin[0], d.spin[1], d.spin[2], d.flux, d.charge;
  };
  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = rel_tol * 1e-3;
  Trajectory traj = ode_solve(rhs, initial.to_vector(), t_span, sample_times, opt);
  const double s0 = initial.spin.norm();
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const double sn = traj.states.col(i).head<3>().norm();
    if (std::abs(sn - s0) > 10.0 * rel_tol * std::max(1.0, s0)) {
      throw NumericsError("integrate: spin norm drift exceeded 10x tolerance");
    }
  }
  return traj;
}

namespace {

VecX uniform_samples(double t0, double t1, Eigen::Index count) {
  VecX t(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    t[i] = t0 + (t1 - t0) * double(i) / double(count - 1);
  }
  return t;
}

}  // namespace

PhaseReadoutResult run_phase_readout(const PhaseReadoutConfig& config) {
  QcParams params;
  params.drive.mode = DriveMode::fm_drive;
  params.drive.modulation_depth = config.Omega;
  params.drive.resonator_frequency = config.omega_r;
  params.drive.rabi_frequency = config.omega_R;
  params.coupling = config.coupling;
  params.drive_coupling = config.drive_coupling;
  params.drive.validate();

  const double period = 2.0 * M_PI / config.omega_r;
  const double t_end = config.n_periods * period;
  const Eigen::Index n_samples = Eigen::Index(config.n_periods) * config.samples_per_period + 1;

  QcState init;
  init.spin = adiabatic_spin(effective_field(0.0, 0.0, params.drive, params.coupling),
                             config.state);
  init.flux = 0.0;
  init.charge = 0.0;

  PhaseReadoutResult out;
  out.trajectory = integrate(params, init, {0.0, t_end},
                             uniform_samples(0.0, t_end, n_samples), config.rel_tol);
  const Trajectory& traj = out.trajectory;

  // Demodulation over the final third of the run, rounded to integer periods.
  const int k_window = std::max(5, config.n_periods / 3);
  const Eigen::Index i0 = traj.size() - Eigen::Index(k_window) * config.samples_per_period - 1;
  const Eigen::Index nw = traj.size() - i0;
  VecX tw(nw), xw(nw);
  for (Eigen::Index i = 0; i < nw; ++i) {
    tw[i] = traj.times[i0 + i];
    xw[i] = traj.states(3, i0 + i);
  }
  const signal::Demodulation dm = signal::demodulate(xw, tw, config.omega_r);
  // Reported relative to the frequency-modulation waveform (proportional to
  // -cos w_r t), which shifts the cos-referenced phase by pi. Ground lands at
  // -pi/2, excited at +pi/2.
  out.phase_estimate = wrap_angle(dm.phase + M_PI);
  out.demod_amplitude = dm.amplitude;

  // Envelope slope: linear fit of per-period max |phi|.
  VecX tk(config.n_periods), mk(config.n_periods);
  for (int k = 0; k < config.n_periods; ++k) {
    double m = 0.0;
    for (Eigen::Index i = Eigen::Index(k) * config.samples_per_period;
         i <= Eigen::Index(k + 1) * config.samples_per_period; ++i) {
      m = std::max(m, std::abs(traj.states(3, i)));
    }
    tk[k] = (k + 0.5) * period;
    mk[k] = m;
  }
  const double tm = tk.mean(), mm = mk.mean();
  double sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < config.n_periods; ++k) {
    sxx += (tk[k] - tm) * (tk[k] - tm);
    sxy += (tk[k] - tm) * (mk[k] - mm);
  }
  out.amplitude_slope = sxy / sxx;

  out.adiabaticity = adiabaticity_margin(params.drive, params.coupling);

  double max_flux = 0.0;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    max_flux = std::max(max_flux, std::abs(traj.states(3, i)));
  }
  out.margins.push_back({"Omega >> 2sqrt2*Lambda*|phi|",
                         config.Omega / (2.0 * kRoot2 * config.coupling * max_flux),
                         config.gg_factor});
  out.margins.push_back({"Omega >> omega_R", config.Omega / config.omega_R,
                         config.gg_factor});
  out.margins.push_back({"omega_R^2/Omega >> omega_r",
                         config.omega_R * config.omega_R /
                             (config.Omega * config.omega_r),
                         config.gg_factor});
  return out;
}

FrequencyReadoutResult run_frequency_readout(const FrequencyReadoutConfig& config) {
  QcParams params;
  params.drive.mode = DriveMode::resonator_drive;
  params.drive.modulation_depth = 0.0;
  params.drive.resonator_frequency = config.omega_r;
  params.drive.rabi_frequency = config.omega_R;
  params.drive.initial_amplitude = config.amplitude;
  params.coupling = config.coupling;
  params.drive_coupling = config.drive_coupling;
  params.drive.validate();

  const double period = 2.0 * M_PI / config.omega_r;
  const double t_end = config.n_periods * period;
  const Eigen::Index n_samples = Eigen::Index(config.n_periods) * config.samples_per_period + 1;

  QcState init;
  init.flux = -config.amplitude;
  init.charge = 0.0;
  init.spin = adiabatic_spin(
      effective_field(0.0, init.flux, params.drive, params.coupling), config.state);

  FrequencyReadoutResult out;
  out.trajectory = integrate(params, init, {0.0, t_end},
                             uniform_samples(0.0, t_end, n_samples), config.rel_tol);
  const Trajectory& traj = out.trajectory;

  // Frequency from the unwrapped analytic-signal angle over an interior window
  // spanning an integer number of nominal periods.
  const int skip = std::min(2, config.n_periods / 4);
  const Eigen::Index i0 = Eigen::Index(skip) * config.samples_per_period;
  const Eigen::Index i1 = traj.size() - 1 - i0;
  const Eigen::Index nw = i1 - i0 + 1;
  VecX tw(nw), pw(nw), qw(nw);
  for (Eigen::Index i = 0; i < nw; ++i) {
    tw[i] = traj.times[i0 + i];
    pw[i] = traj.states(3, i0 + i);
    qw[i] = traj.states(4, i0 + i);
  }
  const signal::FrequencyEstimate fe = signal::instantaneous_frequency(pw, qw, tw);
  out.measured_omega = fe.omega;
  out.measured_stderr = fe.standard_error;
  out.delta_omega = fe.omega - config.omega_r;

  const int sgn = -branch_sign(config.state);  // ground lowers the frequency
  out.predicted_leading = sgn * config.coupling / config.amplitude;
  out.predicted_refined = averaged_frequency_shift(
      config.coupling, config.amplitude, config.omega_R, config.omega_r, config.state);
  out.adiabaticity = adiabaticity_margin(params.drive, params.coupling);

  const double reversal_field = 2.0 * kRoot2 * config.coupling * config.amplitude;
  out.margins.push_back(
      {"2sqrt2*Lambda*A >> omega_R", reversal_field / config.omega_R, config.gg_factor});
  out.margins.push_back({"omega_R^2/(2sqrt2*Lambda*A) >> omega_r",
                         config.omega_R * config.omega_R /
                             (reversal_field * config.omega_r),
                         config.gg_factor});
  out.margins.push_back({"omega_r >> |delta_omega|",
                         config.omega_r / std::abs(out.predicted_refined),
                         config.gg_factor});
  return out;
}

double phase_drift_Q(double amplitude, double coupling, double omega_R) {
  if (!(amplitude > 0.0)) throw ValidationError("phase_drift_Q: amplitude must be positive");
  const double l2a2 = 8.0 * coupling * coupling * amplitude * amplitude;
  const double denom2 = omega_R * omega_R + l2a2;
  const double k2 = l2a2 / denom2;
  const EllipticKE ke = elliptic_KE(std::sqrt(k2));
  return -(4.0 * kRoot2 * coupling / (M_PI * k2 * std::sqrt(denom2))) *
         ((k2 - 1.0) * ke.K + ke.E);
}

double averaged_frequency_shift(double coupling, double amplitude, double omega_R,
                                double omega_r, QubitBranch branch) {
  if (!(omega_r > 0.0)) throw ValidationError("averaged_frequency_shift: omega_r > 0 required");
  // phi'' + phi = eps f(phi) with eps = +- sqrt2 Lambda / omega_r (+ for ground);
  // the drift dpsi/dtau = 1 + eps Q(A) shifts the frequency by omega_r eps Q(A).
  const double eps = branch_sign(branch) * kRoot2 * coupling / omega_r;
  return omega_r * eps * phase_drift_Q(amplitude, coupling, omega_R);
}

double adiabaticity_margin(const ReversalDrive& drive, double coupling) {
  const double wR2 = drive.rabi_frequency * drive.rabi_frequency;
  if (drive.mode == DriveMode::fm_drive) {
    return drive.resonator_frequency * drive.modulation_depth / wR2;
  }
  return 2.0 * kRoot2 * coupling * drive.resonator_frequency * drive.initial_amplitude /
         wR2;
}

double adiabaticity_margin_numeric(const Trajectory& traj, const QcParams& params) {
  double worst = 0.0;
  VecX theta(traj.size()), bmag(traj.size());
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const Vec3 b = effective_field(traj.times[i], traj.states(3, i), params.drive,
                                   params.coupling);
    theta[i] = std::atan2(b[1], b[2]);
    bmag[i] = b.norm();
  }
  signal::unwrap(theta);
  for (Eigen::Index i = 1; i + 1 < traj.size(); ++i) {
    const double rate =
        (theta[i + 1] - theta[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
    worst = std::max(worst, std::abs(rate) / bmag[i]);
  }
  return worst;
}

}  // namespace spinres::quasiclassical
