#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinres/quasiclassical.hpp"
#include "spinres/types.hpp"

namespace spinres::config {

enum class Mode {
  phase_readout,
  frequency_readout,
  perturbation_table,
  nonlinear_decoherence,
  schrodinger_cat,
  master_equation,
};

const char* mode_name(Mode m);
Mode mode_from_string(const std::string& s);

// Fully validated scenario: every field below is effective (defaults applied),
// so echoing it records the defaults explicitly.
struct ScenarioConfig {
  int schema_version = 1;
  Mode mode = Mode::phase_readout;
  QubitBranch qubit_state = QubitBranch::ground;
  double gg_factor = 10.0;

  // rotating-frame physics
  double omega_R = 0.0;
  double Omega = 0.0;
  double omega_r = 0.0;
  double coupling = 0.0;        // Lambda (effective)
  double drive_coupling = 0.0;  // lambda'
  double amplitude = 0.0;       // A (resonator drive)

  // two-level / circuit inputs (only set when provided)
  std::optional<double> epsilon;
  std::optional<double> delta;
  bool coupling_from_circuit = false;

  // perturbation-table inputs
  double omega_q = 0.0;
  double lambda_raw = 0.0;  // lambda (bare qubit-resonator coupling)
  int n_top = 5;
  bool with_exact = true;

  // nonlinear resonator
  Complex alpha = 0.0;
  double mu_bar = 0.0;
  double tau_end = 0.0;  // 0 -> default 4 tau_h
  int sample_count = 4096;

  // quantum / master scenarios
  Complex c0 = 1.0;
  Complex c1 = 0.0;
  int n_max = 0;  // 0 -> truncation rule default
  double dt_max = 0.0;  // 0 -> 0.1 / fastest scale
  double grid_min = 0.0, grid_max = 0.0, grid_spacing = 0.05;  // 0,0 -> auto
  int snapshots = 5;

  // bath
  double quality_factor = 1e12;
  double diffusion = 0.0;

  // run controls
  int n_periods = 20;
  int samples_per_period = 256;
  double tol = 1e-9;
  std::string out_dir = "out";

  // static regime margins recorded at load time
  std::vector<quasiclassical::RegimeMargin> margins;
};

// Parses and validates a JSON scenario file. Unknown keys, missing required
// keys, or contradictory parameter sets (e.g. both Lambda and circuit inputs)
// raise ValidationError.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

}  // namespace spinres::config
