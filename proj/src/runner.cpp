#include "spinres/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "spinres/elliptic.hpp"
#include "spinres/errors.hpp"
#include "spinres/fock.hpp"
#include "spinres/open_system.hpp"
#include "spinres/quantum.hpp"
#include "spinres/quasiclassical.hpp"
#include "spinres/resonator.hpp"
#include "spinres/signal.hpp"
#include "spinres/spectra.hpp"

namespace spinres::runner {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json margins_json(const std::vector<quasiclassical::RegimeMargin>& margins) {
  json out = json::array();
  for (const auto& m : margins) {
    out.push_back({{"name", m.name},
                   {"ratio", m.ratio},
                   {"required", m.required},
                   {"ok", m.ok()}});
  }
  return out;
}

json echo_config(const config::ScenarioConfig& c) {
  json e;
  e["schema_version"] = c.schema_version;
  e["mode"] = config::mode_name(c.mode);
  e["qubit_state"] = branch_name(c.qubit_state);
  e["gg_factor"] = c.gg_factor;
  e["tol"] = c.tol;
  using config::Mode;
  switch (c.mode) {
    case Mode::phase_readout:
    case Mode::frequency_readout:
    case Mode::schrodinger_cat:
    case Mode::master_equation:
      e["omega_R"] = c.omega_R;
      e["Omega"] = c.Omega;
      e["omega_r"] = c.omega_r;
      e["Lambda"] = c.coupling;
      e["lambda_prime"] = c.drive_coupling;
      e["coupling_from_circuit"] = c.coupling_from_circuit;
      e["amplitude"] = c.amplitude;
      e["n_periods"] = c.n_periods;
      e["samples_per_period"] = c.samples_per_period;
      break;
    case Mode::perturbation_table:
      e["omega_q"] = c.omega_q;
      e["omega_r"] = c.omega_r;
      e["lambda"] = c.lambda_raw;
      e["n_top"] = c.n_top;
      e["with_exact"] = c.with_exact;
      break;
    case Mode::nonlinear_decoherence:
      e["alpha_re"] = c.alpha.real();
      e["alpha_im"] = c.alpha.imag();
      e["mu_bar"] = c.mu_bar;
      e["tau_end"] = c.tau_end;
      e["sample_count"] = c.sample_count;
      break;
  }
  if (c.mode == Mode::schrodinger_cat || c.mode == Mode::master_equation) {
    e["alpha_re"] = c.alpha.real();
    e["alpha_im"] = c.alpha.imag();
    e["c0_re"] = c.c0.real();
    e["c0_im"] = c.c0.imag();
    e["c1_re"] = c.c1.real();
    e["c1_im"] = c.c1.imag();
    e["n_max"] = c.n_max;
    e["dt_max"] = c.dt_max;
    e["grid_min"] = c.grid_min;
    e["grid_max"] = c.grid_max;
    e["grid_spacing"] = c.grid_spacing;
    e["snapshots"] = c.snapshots;
  }
  if (c.mode == Mode::master_equation) {
    e["quality_factor"] = c.quality_factor;
    e["diffusion"] = c.diffusion;
  }
  return e;
}

json stats_json(const IntegratorStats& s) {
  return {{"steps", s.steps},
          {"rejected", s.rejected},
          {"rhs_evals", s.rhs_evals},
          {"max_error_estimate", s.max_error_estimate}};
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const quasiclassical::QcParams& params) {
  std::ofstream os(path);
  os.precision(17);
  os << "t,Sx,Sy,Sz,phi_r,q_r,Bz\n";
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const double phi = traj.states(3, i);
    const Vec3 b = quasiclassical::effective_field(t, phi, params.drive, params.coupling);
    os << t << ',' << traj.states(0, i) << ',' << traj.states(1, i) << ','
       << traj.states(2, i) << ',' << phi << ',' << traj.states(4, i) << ',' << b[2]
       << '\n';
  }
}

// Effective n_max for the quantum scenarios: enough levels for the initial
// coherent state plus the flux excursion accumulated over the run.
int quantum_n_max(const config::ScenarioConfig& c, double t_end) {
  if (c.n_max > 0) return c.n_max;
  const double reach = std::sqrt(2.0) * std::abs(c.alpha) + c.coupling * t_end;
  return static_cast<int>(std::ceil(0.75 * reach * reach + 20.0));
}

quantum::FluxGrid quantum_grid(const config::ScenarioConfig& c, double flux_reach) {
  quantum::FluxGrid g;
  if (c.grid_min != 0.0 || c.grid_max != 0.0) {
    g.min = c.grid_min;
    g.max = c.grid_max;
  } else {
    g.min = -(flux_reach + 6.5);
    g.max = flux_reach + 6.5;
  }
  g.spacing = c.grid_spacing;
  return g;
}

json run_phase_mode(const config::ScenarioConfig& c, const fs::path& dir, int& artifacts) {
  quasiclassical::PhaseReadoutConfig pc;
  pc.omega_R = c.omega_R;
  pc.Omega = c.Omega;
  pc.omega_r = c.omega_r;
  pc.coupling = c.coupling;
  pc.drive_coupling = c.drive_coupling;
  pc.state = c.qubit_state;
  pc.n_periods = c.n_periods;
  pc.samples_per_period = c.samples_per_period;
  pc.rel_tol = c.tol;
  pc.gg_factor = c.gg_factor;
  const auto res = quasiclassical::run_phase_readout(pc);

  quasiclassical::QcParams params;
  params.drive = {quasiclassical::DriveMode::fm_drive, c.Omega, c.omega_r, c.omega_R, 0.0};
  params.coupling = c.coupling;
  params.drive_coupling = c.drive_coupling;
  write_trajectory_csv(dir / "trajectory.csv", res.trajectory, params);
  artifacts++;

  json obs;
  obs["phase_estimate"] = res.phase_estimate;
  obs["phase_estimator"] = "quadrature demodulation vs the FM waveform, final third";
  obs["amplitude_slope"] = res.amplitude_slope;
  obs["amplitude_estimator"] = "linear fit of per-period max |phi_r|";
  obs["demod_amplitude"] = res.demod_amplitude;
  obs["adiabaticity_margin"] = res.adiabaticity;
  obs["equilibrium_shift"] = params.equilibrium_shift();
  json rep;
  rep["observables"] = obs;
  rep["margins"] = margins_json(res.margins);
  rep["integrator"] = stats_json(res.trajectory.stats);
  return rep;
}

json run_frequency_mode(const config::ScenarioConfig& c, const fs::path& dir,
                        int& artifacts) {
  quasiclassical::FrequencyReadoutConfig fc;
  fc.omega_R = c.omega_R;
  fc.coupling = c.coupling;
  fc.amplitude = c.amplitude;
  fc.omega_r = c.omega_r;
  fc.drive_coupling = c.drive_coupling;
  fc.state = c.qubit_state;
  fc.n_periods = c.n_periods;
  fc.samples_per_period = c.samples_per_period;
  fc.rel_tol = c.tol;
  fc.gg_factor = c.gg_factor;
  const auto res = quasiclassical::run_frequency_readout(fc);

  quasiclassical::QcParams params;
  params.drive = {quasiclassical::DriveMode::resonator_drive, 0.0, c.omega_r, c.omega_R,
                  c.amplitude};
  params.coupling = c.coupling;
  params.drive_coupling = c.drive_coupling;
  write_trajectory_csv(dir / "trajectory.csv", res.trajectory, params);
  artifacts++;

  json obs;
  obs["measured_omega"] = res.measured_omega;
  obs["measured_stderr"] = res.measured_stderr;
  obs["delta_omega"] = res.delta_omega;
  obs["frequency_estimator"] = "linear fit of unwrapped atan2(q_r, phi_r), interior window";
  obs["predicted_leading"] = res.predicted_leading;
  obs["predicted_refined"] = res.predicted_refined;
  obs["adiabaticity_margin"] = res.adiabaticity;
  obs["equilibrium_shift"] = params.equilibrium_shift();
  json rep;
  rep["observables"] = obs;
  rep["margins"] = margins_json(res.margins);
  rep["integrator"] = stats_json(res.trajectory.stats);
  return rep;
}

json run_table_mode(const config::ScenarioConfig& c, const fs::path& dir, int& artifacts) {
  auto table = spectra::perturbative_table(c.lambda_raw, c.omega_q, c.omega_r, c.n_top);
  if (c.with_exact) spectra::attach_exact(table, c.lambda_raw, c.omega_q, c.omega_r);
  {
    std::ofstream os(dir / "spectrum.csv");
    table.write_csv(os);
    artifacts++;
  }
  json obs;
  obs["dispersive_shift"] = spectra::dispersive_shift(c.lambda_raw, c.omega_q, c.omega_r);
  obs["lamb_shift"] = spectra::lamb_shift(c.lambda_raw, c.omega_q, c.omega_r);
  for (QubitBranch s : {QubitBranch::ground, QubitBranch::excited}) {
    const auto p = spectra::effective_nonlinear_params(c.lambda_raw, c.omega_q, c.omega_r, s);
    json pj{{"base_frequency", p.base_frequency},
            {"nonlinearity", p.nonlinearity},
            {"constant_offset", p.constant_offset}};
    obs[std::string("nonlinear_params_") + branch_name(s)] = pj;
  }
  json rep;
  rep["observables"] = obs;
  rep["margins"] = json::array();
  rep["integrator"] = nullptr;
  return rep;
}

json run_kerr_mode(const config::ScenarioConfig& c, const fs::path& dir, int& artifacts) {
  const double nbar = std::norm(c.alpha);
  const auto ts = resonator::time_scales(c.alpha, c.mu_bar, 0.0);
  const double tau_end = c.tau_end > 0.0 ? c.tau_end : 4.0 * ts.quantum_departure;
  const int n = c.sample_count;
  {
    std::ofstream os(dir / "amplitude.csv");
    os.precision(17);
    os << "tau,re,im,abs\n";
    for (int i = 0; i < n; ++i) {
      const double tau = tau_end * i / (n - 1.0);
      const Complex a = resonator::coherent_amplitude(c.alpha, c.mu_bar, tau);
      os << tau << ',' << a.real() << ',' << a.imag() << ',' << std::abs(a) << '\n';
    }
    artifacts++;
  }
  // spectral width over a centered window of the same length
  CVecX sig(n);
  const double dt = tau_end / (n - 1.0);
  for (int i = 0; i < n; ++i) {
    sig[i] = resonator::coherent_amplitude(c.alpha, c.mu_bar, -0.5 * tau_end + i * dt);
  }
  const auto spec = signal::power_spectrum(sig, dt, signal::Window::rectangular, 8);
  VecX mag = spec.power.cwiseSqrt();
  Eigen::Index ipk = 0;
  mag.maxCoeff(&ipk);
  const double thresh = mag[ipk] / std::exp(1.0);
  Eigen::Index lo = ipk, hi = ipk;
  while (lo > 0 && mag[lo - 1] >= thresh) --lo;
  while (hi + 1 < mag.size() && mag[hi + 1] >= thresh) ++hi;
  const double width = 2.0 * M_PI * std::abs(spec.frequency[hi] - spec.frequency[lo]);

  const auto qq = resonator::quantum_quality(ts.quantum_departure);
  json obs;
  obs["nbar"] = nbar;
  obs["tau_h"] = ts.quantum_departure;
  obs["tau_R"] = ts.revival_time;
  obs["tau_cl"] = ts.classical_period;
  obs["line_width_predicted"] = qq.line_width;
  obs["line_width_measured"] = width;
  obs["width_estimator"] = "1/e full width of |FFT| over a centered window";
  obs["quantum_quality"] = qq.quality_factor;
  json rep;
  rep["observables"] = obs;
  rep["margins"] = json::array();
  rep["integrator"] = nullptr;
  return rep;
}

void write_density_csv(const fs::path& path, const quantum::FluxDensity& d) {
  std::ofstream os(path);
  os.precision(17);
  os << "phi_r,rho_up,rho_down,total\n";
  for (Eigen::Index i = 0; i < d.grid.size(); ++i) {
    os << d.grid[i] << ',' << d.up[i] << ',' << d.down[i] << ','
       << d.up[i] + d.down[i] << '\n';
  }
}

json run_cat_mode(const config::ScenarioConfig& c, const fs::path& dir, int& artifacts) {
  quantum::QuantumParams qp{c.omega_r, c.omega_R, c.Omega, c.coupling, c.drive_coupling};
  const double period = 2.0 * M_PI / c.omega_r;
  const double t_end = c.n_periods * period;
  const int n_max = quantum_n_max(c, t_end);
  const auto state0 = quantum::init_spinor(c.alpha, c.c0, c.c1, n_max);

  quantum::EvolveOptions opt;
  const double fastest =
      std::max({std::abs(c.Omega), c.omega_R, quantum::spectral_bound(qp, n_max)});
  opt.dt_max = c.dt_max > 0.0 ? c.dt_max : 0.1 / fastest;
  opt.tol = std::max(c.tol, 1e-10);

  const Eigen::Index n_samples = Eigen::Index(c.n_periods) * c.samples_per_period + 1;
  VecX sample_times(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    sample_times[i] = t_end * double(i) / double(n_samples - 1);
  }
  const auto states = quantum::evolve(state0, {0.0, t_end}, sample_times, qp, opt);

  const double reach = std::sqrt(2.0) * std::abs(c.alpha) + c.coupling * t_end + 2.0;
  const quantum::FluxGrid grid = quantum_grid(c, reach);

  // branch tracks + weights
  std::ofstream bos(dir / "branches.csv");
  bos.precision(17);
  bos << "t,phi_a,phi_b,w_a,w_b,reliable\n";
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const auto bd = quantum::decompose_branches(states[i], sample_times[i], qp, grid);
    bos << sample_times[i] << ',' << bd.peak_a << ',' << bd.peak_b << ',' << bd.w_a
        << ',' << bd.w_b << ',' << (bd.reliable ? 1 : 0) << '\n';
  }
  artifacts++;

  // density snapshots
  for (int k = 0; k < c.snapshots; ++k) {
    const Eigen::Index i = (n_samples - 1) * (k + 1) / c.snapshots;
    char name[64];
    std::snprintf(name, sizeof(name), "density_%04d.csv", k);
    write_density_csv(dir / name, quantum::flux_density(states[i], grid));
    artifacts++;
  }

  const auto& fin = states.back();
  json obs;
  obs["n_max"] = n_max;
  obs["dt_max"] = opt.dt_max;
  obs["final_norm"] = fin.norm();
  obs["final_tail_mass"] = fin.tail_mass();
  obs["final_mean_flux"] = fin.mean_flux();
  obs["final_mean_photons"] = fin.mean_photons();
  const auto bd = quantum::decompose_branches(fin, t_end, qp, grid);
  obs["final_w_a"] = bd.w_a;
  obs["final_w_b"] = bd.w_b;
  obs["final_peak_a"] = bd.peak_a;
  obs["final_peak_b"] = bd.peak_b;
  json rep;
  rep["observables"] = obs;
  rep["margins"] = json::array();
  rep["integrator"] = nullptr;
  return rep;
}

json run_master_mode(const config::ScenarioConfig& c, const fs::path& dir, int& artifacts) {
  quantum::QuantumParams qp{c.omega_r, c.omega_R, c.Omega, c.coupling, c.drive_coupling};
  open_system::BathParams bath{c.quality_factor, c.diffusion};
  const double period_tau = 2.0 * M_PI;  // one resonator period in tau units
  const double tau_end = c.n_periods * period_tau;
  const int n_max = quantum_n_max(c, tau_end / c.omega_r);
  const auto rho0 = open_system::init_density(c.alpha, c.c0, c.c1, n_max);

  const Eigen::Index n_samples = Eigen::Index(c.n_periods) * c.samples_per_period + 1;
  VecX taus(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    taus[i] = tau_end * double(i) / double(n_samples - 1);
  }
  open_system::MasterOptions mo;
  mo.rel_tol = std::max(c.tol, 1e-10);
  open_system::MasterStats stats;
  const auto rhos = open_system::evolve_master(rho0, taus, qp, bath, mo, &stats);

  const double reach = std::sqrt(2.0) * std::abs(c.alpha) + 2.0;
  const quantum::FluxGrid grid = quantum_grid(c, reach);

  std::ofstream fos(dir / "fourpeak.csv");
  fos.precision(17);
  fos << "tau,w1,w2,w3,w4,coherence,resolved\n";
  double last_coherence = 1.0;
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const auto fp = open_system::four_peak_decomposition(rhos[i], grid);
    double coh = std::numeric_limits<double>::quiet_NaN();
    if (fp.w1 * fp.w2 >= 1e-12) {
      coh = fp.w3 / std::sqrt(fp.w1 * fp.w2);
      last_coherence = coh;
    }
    fos << taus[i] << ',' << fp.w1 << ',' << fp.w2 << ',' << fp.w3 << ',' << fp.w4
        << ',' << coh << ',' << (fp.resolved ? 1 : 0) << '\n';
  }
  artifacts++;

  // spin-traced |rho(phi, phi')| of the final state
  {
    const VecX g = grid.points();
    const MatX u = fock::hermite_functions(g, n_max);
    const Eigen::Index nf = n_max + 1;
    const CMatX total = rhos.back().rho.topLeftCorner(nf, nf) +
                        rhos.back().rho.bottomRightCorner(nf, nf);
    const CMatX gmat = u * total * u.transpose();
    std::ofstream os(dir / "rho_abs_final.csv");
    os.precision(10);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        os << std::abs(gmat(i, j)) << (j + 1 < g.size() ? ',' : '\n');
      }
    }
    artifacts++;
  }

  json obs;
  obs["n_max"] = n_max;
  obs["final_trace"] = rhos.back().trace();
  obs["final_coherence"] = last_coherence;
  obs["max_symmetrization"] = stats.max_symmetrization;
  obs["max_trace_drift"] = stats.max_trace_drift;
  obs["min_eigenvalue_seen"] = stats.min_eigenvalue_seen;
  json rep;
  rep["observables"] = obs;
  rep["margins"] = json::array();
  rep["integrator"] = stats_json(stats.integrator);
  return rep;
}

}  // namespace

RunResult run(const config::ScenarioConfig& c, const std::string& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto wall_start = std::chrono::system_clock::now();
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  int artifacts = 0;
  json rep;
  using config::Mode;
  switch (c.mode) {
    case Mode::phase_readout: rep = run_phase_mode(c, dir, artifacts); break;
    case Mode::frequency_readout: rep = run_frequency_mode(c, dir, artifacts); break;
    case Mode::perturbation_table: rep = run_table_mode(c, dir, artifacts); break;
    case Mode::nonlinear_decoherence: rep = run_kerr_mode(c, dir, artifacts); break;
    case Mode::schrodinger_cat: rep = run_cat_mode(c, dir, artifacts); break;
    case Mode::master_equation: rep = run_master_mode(c, dir, artifacts); break;
  }

  json full;
  full["schema_version"] = 1;
  full["mode"] = config::mode_name(c.mode);
  full["config_echo"] = echo_config(c);
  json static_margins = margins_json(c.margins);
  full["load_margins"] = static_margins;
  full["observables"] = rep["observables"];
  full["margins"] = rep["margins"];
  full["integrator"] = rep["integrator"];

  RunResult out;
  out.report_json = full.dump(2);
  out.artifacts_written = artifacts + 1;

  const auto t_end = std::chrono::steady_clock::now();
  json stamped = full;
  stamped["timestamps"] = {
      {"started_unix_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(wall_start.time_since_epoch())
           .count()},
      {"wall_seconds",
       std::chrono::duration_cast<std::chrono::milliseconds>(t_end - t_start).count() /
           1000.0}};
  std::ofstream os(dir / "report.json");
  os << stamped.dump(2) << '\n';
  return out;
}

}  // namespace spinres::runner
