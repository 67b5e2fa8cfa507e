#include "spinres/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spinres/errors.hpp"
#include "spinres/qubit.hpp"

namespace spinres::config {

using nlohmann::json;

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::phase_readout: return "phase-readout";
    case Mode::frequency_readout: return "frequency-readout";
    case Mode::perturbation_table: return "perturbation-table";
    case Mode::nonlinear_decoherence: return "nonlinear-decoherence";
    case Mode::schrodinger_cat: return "schrodinger-cat";
    case Mode::master_equation: return "master-equation";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::phase_readout, Mode::frequency_readout, Mode::perturbation_table,
                 Mode::nonlinear_decoherence, Mode::schrodinger_cat,
                 Mode::master_equation}) {
    if (s == mode_name(m)) return m;
  }
  throw ValidationError("config: unknown mode '" + s + "'");
}

namespace {

const std::set<std::string> kCommonKeys = {
    "schema_version", "mode", "qubit_state", "gg_factor", "tol", "out_dir"};

const std::set<std::string> kCircuitKeys = {
    "mutual_inductance", "resonator_inductance", "qubit_inductance",
    "resonator_capacitance", "phi_ll", "phi_rr"};

std::set<std::string> allowed_keys(Mode m) {
  std::set<std::string> keys = kCommonKeys;
  auto add = [&](std::initializer_list<const char*> ks) {
    for (const char* k : ks) keys.insert(k);
  };
  switch (m) {
    case Mode::phase_readout:
      add({"omega_R", "Omega", "omega_r", "Lambda", "lambda_prime", "epsilon", "delta",
           "n_periods", "samples_per_period"});
      keys.insert(kCircuitKeys.begin(), kCircuitKeys.end());
      break;
    case Mode::frequency_readout:
      add({"omega_R", "Omega", "omega_r", "Lambda", "lambda_prime", "epsilon", "delta",
           "amplitude", "n_periods", "samples_per_period"});
      keys.insert(kCircuitKeys.begin(), kCircuitKeys.end());
      break;
    case Mode::perturbation_table:
      add({"omega_q", "omega_r", "lambda", "n_top", "with_exact"});
      break;
    case Mode::nonlinear_decoherence:
      add({"alpha_re", "alpha_im", "mu_bar", "tau_end", "sample_count"});
      break;
    case Mode::schrodinger_cat:
      add({"omega_R", "Omega", "omega_r", "Lambda", "lambda_prime", "epsilon", "delta",
           "amplitude", "alpha_re", "alpha_im", "c0_re", "c0_im", "c1_re", "c1_im",
           "n_periods", "samples_per_period", "n_max", "dt_max", "grid_min", "grid_max",
           "grid_spacing", "snapshots"});
      keys.insert(kCircuitKeys.begin(), kCircuitKeys.end());
      break;
    case Mode::master_equation:
      add({"omega_R", "Omega", "omega_r", "Lambda", "lambda_prime", "epsilon", "delta",
           "amplitude", "alpha_re", "alpha_im", "c0_re", "c0_im", "c1_re", "c1_im",
           "n_periods", "samples_per_period", "n_max", "grid_min", "grid_max",
           "grid_spacing", "snapshots", "quality_factor", "diffusion"});
      keys.insert(kCircuitKeys.begin(), kCircuitKeys.end());
      break;
  }
  return keys;
}

double get_num(const json& j, const std::string& key, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ValidationError("config: missing required key '" + key + "'");
  }
  if (!j.at(key).is_number()) {
    throw ValidationError("config: key '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, std::optional<int> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ValidationError("config: missing required key '" + key + "'");
  }
  if (!j.at(key).is_number_integer()) {
    throw ValidationError("config: key '" + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

void resolve_coupling(const json& j, ScenarioConfig& cfg) {
  const bool direct = j.contains("Lambda");
  bool circuit = false;
  for (const auto& k : kCircuitKeys) circuit |= j.contains(k);
  if (direct && circuit) {
    throw ValidationError("config: give either Lambda or the circuit inputs, not both");
  }
  if (j.contains("epsilon")) cfg.epsilon = get_num(j, "epsilon");
  if (j.contains("delta")) cfg.delta = get_num(j, "delta");
  if (direct) {
    cfg.coupling = get_num(j, "Lambda");
    cfg.drive_coupling = get_num(j, "lambda_prime", 0.0);
    return;
  }
  if (circuit) {
    if (j.contains("lambda_prime")) {
      throw ValidationError("config: lambda_prime is derived from the circuit inputs");
    }
    if (!cfg.epsilon || !cfg.delta) {
      throw ValidationError("config: circuit inputs need epsilon and delta for the mixing angle");
    }
    const auto lc = qubit::inductive_coupling(
        get_num(j, "mutual_inductance"), get_num(j, "resonator_inductance"),
        get_num(j, "qubit_inductance"), get_num(j, "resonator_capacitance"),
        get_num(j, "omega_r"), get_num(j, "phi_ll"), get_num(j, "phi_rr"));
    const auto mix = qubit::mixing_angle(*cfg.epsilon, *cfg.delta);
    cfg.coupling = lc.lambda * mix.cos_alpha;
    cfg.drive_coupling = lc.lambda_prime;
    cfg.coupling_from_circuit = true;
    return;
  }
  throw ValidationError("config: coupling missing (Lambda or circuit inputs required)");
}

void record_margins(ScenarioConfig& cfg) {
  using quasiclassical::RegimeMargin;
  const double f = cfg.gg_factor;
  auto add = [&](const std::string& name, double ratio) {
    cfg.margins.push_back(RegimeMargin{name, ratio, f});
  };
  switch (cfg.mode) {
    case Mode::phase_readout:
    case Mode::schrodinger_cat:
    case Mode::master_equation:
      if (cfg.Omega > 0.0) {
        add("Omega >> omega_R", cfg.Omega / cfg.omega_R);
        add("omega_R^2/Omega >> omega_r",
            cfg.omega_R * cfg.omega_R / (cfg.Omega * cfg.omega_r));
      } else if (cfg.amplitude > 0.0) {
        const double rev = 2.0 * std::sqrt(2.0) * cfg.coupling * cfg.amplitude;
        add("2sqrt2*Lambda*A >> omega_R", rev / cfg.omega_R);
        add("omega_R^2/(2sqrt2*Lambda*A) >> omega_r",
            cfg.omega_R * cfg.omega_R / (rev * cfg.omega_r));
      }
      break;
    case Mode::frequency_readout: {
      const double rev = 2.0 * std::sqrt(2.0) * cfg.coupling * cfg.amplitude;
      add("2sqrt2*Lambda*A >> omega_R", rev / cfg.omega_R);
      add("omega_R^2/(2sqrt2*Lambda*A) >> omega_r",
          cfg.omega_R * cfg.omega_R / (rev * cfg.omega_r));
      break;
    }
    default:
      break;
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  if (!j.contains("mode")) throw ValidationError("config: missing required key 'mode'");
  if (!j.at("mode").is_string()) throw ValidationError("config: 'mode' must be a string");

  ScenarioConfig cfg;
  cfg.mode = mode_from_string(j.at("mode").get<std::string>());

  const auto allowed = allowed_keys(cfg.mode);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ValidationError("config: unknown key '" + key + "' for mode " +
                            mode_name(cfg.mode));
    }
  }

  cfg.schema_version = get_int(j, "schema_version", 1);
  if (cfg.schema_version != 1) {
    throw ValidationError("config: unsupported schema_version");
  }
  if (j.contains("qubit_state")) {
    const std::string s = j.at("qubit_state").get<std::string>();
    if (s == "ground") {
      cfg.qubit_state = QubitBranch::ground;
    } else if (s == "excited") {
      cfg.qubit_state = QubitBranch::excited;
    } else {
      throw ValidationError("config: qubit_state must be 'ground' or 'excited'");
    }
  }
  cfg.gg_factor = get_num(j, "gg_factor", 10.0);
  cfg.tol = get_num(j, "tol", 1e-9);
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

  switch (cfg.mode) {
    case Mode::phase_readout: {
      cfg.omega_R = get_num(j, "omega_R");
      cfg.Omega = get_num(j, "Omega");
      cfg.omega_r = get_num(j, "omega_r");
      resolve_coupling(j, cfg);
      cfg.n_periods = get_int(j, "n_periods", 20);
      cfg.samples_per_period = get_int(j, "samples_per_period", 256);
      if (!(cfg.Omega > 0.0)) {
        throw ValidationError("config: phase-readout requires Omega > 0");
      }
      break;
    }
    case Mode::frequency_readout: {
      cfg.omega_R = get_num(j, "omega_R");
      cfg.omega_r = get_num(j, "omega_r");
      cfg.amplitude = get_num(j, "amplitude");
      cfg.Omega = get_num(j, "Omega", 0.0);
      if (cfg.Omega != 0.0) {
        throw ValidationError("config: frequency-readout requires Omega = 0");
      }
      resolve_coupling(j, cfg);
      cfg.n_periods = get_int(j, "n_periods", 30);
      cfg.samples_per_period = get_int(j, "samples_per_period", 256);
      if (!(cfg.amplitude > 0.0)) {
        throw ValidationError("config: frequency-readout requires amplitude > 0");
      }
      break;
    }
    case Mode::perturbation_table: {
      cfg.omega_q = get_num(j, "omega_q");
      cfg.omega_r = get_num(j, "omega_r");
      cfg.lambda_raw = get_num(j, "lambda");
      cfg.n_top = get_int(j, "n_top", 5);
      cfg.with_exact = j.contains("with_exact") ? j.at("with_exact").get<bool>() : true;
      break;
    }
    case Mode::nonlinear_decoherence: {
      cfg.alpha = Complex(get_num(j, "alpha_re"), get_num(j, "alpha_im", 0.0));
      cfg.mu_bar = get_num(j, "mu_bar");
      cfg.tau_end = get_num(j, "tau_end", 0.0);
      cfg.sample_count = get_int(j, "sample_count", 4096);
      if (!(std::abs(cfg.alpha) > 0.0) || !(cfg.mu_bar > 0.0)) {
        throw ValidationError("config: nonlinear-decoherence needs |alpha| > 0 and mu_bar > 0");
      }
      break;
    }
    case Mode::schrodinger_cat:
    case Mode::master_equation: {
      cfg.omega_R = get_num(j, "omega_R");
      cfg.omega_r = get_num(j, "omega_r");
      cfg.Omega = get_num(j, "Omega", 0.0);
      cfg.amplitude = get_num(j, "amplitude", 0.0);
      resolve_coupling(j, cfg);
      if ((cfg.Omega > 0.0) == (cfg.amplitude > 0.0)) {
        throw ValidationError(
            "config: quantum scenarios need exactly one drive: Omega > 0 (fm) or "
            "amplitude > 0 (resonator)");
      }
      cfg.alpha = Complex(get_num(j, "alpha_re", cfg.amplitude > 0.0
                                                     ? -cfg.amplitude / std::sqrt(2.0)
                                                     : 0.0),
                          get_num(j, "alpha_im", 0.0));
      cfg.c0 = Complex(get_num(j, "c0_re", 1.0), get_num(j, "c0_im", 0.0));
      cfg.c1 = Complex(get_num(j, "c1_re", 0.0), get_num(j, "c1_im", 0.0));
      const double nn = std::norm(cfg.c0) + std::norm(cfg.c1);
      if (std::abs(nn - 1.0) > 1e-8) {
        throw ValidationError("config: |c0|^2 + |c1|^2 must equal 1");
      }
      cfg.n_periods = get_int(j, "n_periods", 2);
      cfg.samples_per_period = get_int(j, "samples_per_period", 64);
      cfg.n_max = get_int(j, "n_max", 0);
      cfg.dt_max = get_num(j, "dt_max", 0.0);
      cfg.grid_min = get_num(j, "grid_min", 0.0);
      cfg.grid_max = get_num(j, "grid_max", 0.0);
      cfg.grid_spacing = get_num(j, "grid_spacing", 0.05);
      cfg.snapshots = get_int(j, "snapshots", 5);
      if (cfg.mode == Mode::master_equation) {
        cfg.quality_factor = get_num(j, "quality_factor", 1e12);
        cfg.diffusion = get_num(j, "diffusion", 0.0);
      }
      break;
    }
  }
  record_margins(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace spinres::config
