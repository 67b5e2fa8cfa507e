#pragma once

#include <cmath>

#include "spinres/errors.hpp"
#include "spinres/types.hpp"

namespace spinres::qubit {

// Josephson junction circuit constants. E_J = I_c * phi0 / (2 pi).
template <typename Scalar = Real>
struct JunctionParamsT {
  Scalar critical_current;
  Scalar junction_capacitance;
  Scalar flux_quantum;

  Scalar josephson_energy() const {
    return critical_current * flux_quantum / (Scalar(2) * Scalar(M_PI));
  }
  Scalar josephson_inductance_zero_phase() const {
    return flux_quantum / (Scalar(2) * Scalar(M_PI) * critical_current);
  }
  void validate() const {
    if (!(critical_current > Scalar(0)) || !(junction_capacitance > Scalar(0)) ||
        !(flux_quantum > Scalar(0))) {
      throw ValidationError("JunctionParams: I_c, C_J, phi0 must be positive");
    }
  }
};
using JunctionParams = JunctionParamsT<>;

// Quartic double-well constants of the flux-biased loop. `asymmetry` is the
// small well parameter chi = E_J/E_L - 1; `bias_asymmetry` is the tilt f.
template <typename Scalar = Real>
struct DoubleWellParamsT {
  Scalar inductive_energy;
  Scalar asymmetry;
  Scalar bias_asymmetry = Scalar(0);
  Scalar self_inductance = Scalar(1);

  void validate() const {
    if (!(inductive_energy > Scalar(0)) || !(asymmetry > Scalar(0))) {
      throw ValidationError("DoubleWellParams: E_L and chi must be positive");
    }
  }
};
using DoubleWellParams = DoubleWellParamsT<>;

// Two-level reduction: detuning epsilon and tunnel splitting Delta, both as
// energies (hbar = 1 -> angular frequencies). Delta is stored non-negative.
template <typename Scalar = Real>
struct TwoLevelParamsT {
  Scalar level_detuning;
  Scalar tunnel_splitting;

  Scalar gap() const {
    return std::hypot(level_detuning, tunnel_splitting);
  }
  void validate() const {
    if (tunnel_splitting < Scalar(0)) {
      throw ValidationError("TwoLevelParams: Delta must be >= 0");
    }
    if (!(gap() > Scalar(0))) {
      throw DegeneracyError("TwoLevelParams: epsilon = Delta = 0 is degenerate");
    }
  }
};
using TwoLevelParams = TwoLevelParamsT<>;

// Spin-resonator coupling constants; effective_coupling = lambda * cos(alpha).
struct CouplingParams {
  double raw_coupling = 0.0;    // lambda
  double drive_coupling = 0.0;  // lambda'
  double mixing_cos = 1.0;
  double mixing_sin = 0.0;

  double effective_coupling() const { return raw_coupling * mixing_cos; }
};

// Tilted-washboard potential U(delta) = -E_J (bias_ratio * delta + cos delta).
template <typename Scalar>
Scalar washboard_potential(Scalar delta, Scalar bias_ratio, Scalar josephson_energy) {
  return -josephson_energy * (bias_ratio * delta + std::cos(delta));
}

// Phase-dependent junction inductance L_J / cos(delta). Errors out within
// `cos_floor` of the +-pi/2 singularities.
template <typename Scalar>
Scalar josephson_inductance(Scalar delta, Scalar junction_inductance,
                            Scalar cos_floor = Scalar(1e-9)) {
  const Scalar c = std::cos(delta);
  if (std::abs(c) < cos_floor) {
    throw SingularityError("josephson_inductance: |cos(delta)| below floor");
  }
  return junction_inductance / c;
}

// Loop potential of the flux-biased junction:
// U(phi) = -E_J cos(2 pi phi / phi0) + (phi - phi_e)^2 / (2 L).
template <typename Scalar>
Scalar rf_squid_potential(Scalar flux, Scalar josephson_energy, Scalar self_inductance,
                          Scalar external_flux, Scalar flux_quantum) {
  if (!(self_inductance > Scalar(0))) {
    throw ValidationError("rf_squid_potential: L_self must be positive");
  }
  const Scalar twopi = Scalar(2) * Scalar(M_PI);
  const Scalar d = flux - external_flux;
  return -josephson_energy * std::cos(twopi * flux / flux_quantum) +
         d * d / (Scalar(2) * self_inductance);
}

// Quartic expansion of the loop potential around half-flux bias, in the
// dimensionless well coordinate delta_t:
// U = E_L [1 + chi - (chi/2) d^2 + (1+chi) d^4/24 - d f].
template <typename Scalar>
Scalar quartic_potential(Scalar delta_t, const DoubleWellParamsT<Scalar>& p) {
  const Scalar d2 = delta_t * delta_t;
  return p.inductive_energy *
         (Scalar(1) + p.asymmetry - (p.asymmetry / Scalar(2)) * d2 +
          (Scalar(1) + p.asymmetry) * d2 * d2 / Scalar(24) -
          delta_t * p.bias_asymmetry);
}

// Dimensionless well minima +-sqrt(6 chi / (1 + chi)) of the symmetric quartic.
template <typename Scalar>
Scalar quartic_minimum_position(const DoubleWellParamsT<Scalar>& p) {
  return std::sqrt(Scalar(6) * p.asymmetry / (Scalar(1) + p.asymmetry));
}

template <typename Scalar = Real>
struct TwoLevelEigensystemT {
  Scalar energy_ground;   // -gap/2
  Scalar energy_excited;  // +gap/2
  // Components in the localized |l>, |r> well basis.
  Eigen::Matrix<Scalar, 2, 1> ground;
  Eigen::Matrix<Scalar, 2, 1> excited;
};
using TwoLevelEigensystem = TwoLevelEigensystemT<>;

// Eigensystem of H = -(eps sigma_z + Delta sigma_x)/2 in the |l>,|r> basis.
// The ground state carries no sign change for Delta > 0.
template <typename Scalar>
TwoLevelEigensystemT<Scalar> two_level_eigensystem(const TwoLevelParamsT<Scalar>& p) {
  p.validate();
  const Scalar eps = p.level_detuning;
  const Scalar gap = p.gap();
  TwoLevelEigensystemT<Scalar> out;
  out.energy_ground = -gap / Scalar(2);
  out.energy_excited = gap / Scalar(2);
  // cg^2 + ce^2 = 1; stable for every (eps, Delta >= 0) including Delta = 0,
  // where the ordering follows the sign of eps = E_r - E_l.
  const Scalar cg = std::sqrt((gap + eps) / (Scalar(2) * gap));
  const Scalar ce = std::sqrt((gap - eps) / (Scalar(2) * gap));
  out.ground << cg, ce;
  out.excited << ce, -cg;
  return out;
}

struct MixingAngle {
  double cos_alpha;
  double sin_alpha;
};

// cos(alpha) = eps/gap, sin(alpha) = |Delta|/gap.
inline MixingAngle mixing_angle(double epsilon, double delta) {
  const double gap = std::hypot(epsilon, delta);
  if (!(gap > 0.0)) throw DegeneracyError("mixing_angle: epsilon = Delta = 0");
  return {epsilon / gap, std::abs(delta) / gap};
}

// Inductive coupling constants from circuit quantities (hbar = 1 internally):
// lambda = M/(2 L L1) * sqrt(1/(2 omega_r C)) * (phi_ll - phi_rr),
// lambda' = lambda (phi_ll + phi_rr)/(phi_ll - phi_rr).
struct InductiveCoupling {
  double lambda;
  double lambda_prime;
};

inline InductiveCoupling inductive_coupling(double mutual_inductance,
                                            double resonator_inductance,
                                            double qubit_loop_inductance,
                                            double resonator_capacitance,
                                            double omega_r, double phi_ll,
                                            double phi_rr) {
  if (!(resonator_inductance > 0.0) || !(qubit_loop_inductance > 0.0) ||
      !(resonator_capacitance > 0.0) || !(omega_r > 0.0)) {
    throw ValidationError("inductive_coupling: L, L1, C, omega_r must be positive");
  }
  const double contrast = phi_ll - phi_rr;
  const double lambda = mutual_inductance /
                        (2.0 * resonator_inductance * qubit_loop_inductance) *
                        std::sqrt(1.0 / (2.0 * omega_r * resonator_capacitance)) *
                        contrast;
  if (contrast == 0.0) {
    throw ValidationError("inductive_coupling: phi_ll == phi_rr has no flux contrast");
  }
  return {lambda, lambda * (phi_ll + phi_rr) / contrast};
}

// Completing the square over the two loop inductances:
// phi_e' = phi_e L1/(L1+L_J), L_J' = L1 L_J/(L1+L_J).
struct EffectiveBias {
  double external_flux;
  double inductance;
};

inline EffectiveBias effective_bias(double external_flux, double shunt_inductance,
                                    double junction_inductance) {
  if (!(shunt_inductance > 0.0) || !(junction_inductance > 0.0)) {
    throw ValidationError("effective_bias: inductances must be positive");
  }
  const double s = shunt_inductance + junction_inductance;
  return {external_flux * shunt_inductance / s,
          shunt_inductance * junction_inductance / s};
}

}  // namespace spinres::qubit
