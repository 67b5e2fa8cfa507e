#pragma once

#include <iosfwd>
#include <vector>

#include "spinres/resonator.hpp"
#include "spinres/types.hpp"

namespace spinres::spectra {

struct LevelIndex {
  int photon_number = 0;
  QubitBranch qubit_state = QubitBranch::ground;
};

struct SpectrumRow {
  LevelIndex level;
  double e0 = 0.0;
  double e2 = 0.0;
  double e4 = 0.0;
  double e_exact = std::numeric_limits<double>::quiet_NaN();

  double e_total() const { return e0 + e2 + e4; }
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;  // sorted by (qubit_state, n)

  const SpectrumRow& at(QubitBranch s, int n) const;
  void write_csv(std::ostream& os) const;  // state,n,E0,E2,E4,E_total,E_exact
};

// Relative degeneracy floor: perturbative operations reject |omega_q - omega_r|
// below this fraction of omega_r instead of returning huge numbers.
inline constexpr double kDegeneracyFloor = 1e-6;

// E0 = -/+ omega_q/2 + omega_r (n + 1/2).
double unperturbed_level(LevelIndex idx, double omega_q, double omega_r);

// Second-order level displacement from the sigma_y (a^dagger - a) coupling.
double second_order_shift(LevelIndex idx, double lambda, double omega_q, double omega_r);

// Qubit-state-dependent resonator pull: delta omega_r = -2 lambda^2 omega_q /
// (omega_q^2 - omega_r^2).
double dispersive_shift(double lambda, double omega_q, double omega_r);

// Lamb shift of the qubit frequency at n = 0: 2 lambda^2 omega_q / (omega_q^2 - omega_r^2).
double lamb_shift(double lambda, double omega_q, double omega_r);

enum class FourthOrderVariant {
  full,           // complete fourth-order expressions
  near_resonant,  // leading terms for omega_q ~ omega_r: +-n^2, -(n+1)^2 scaling
  far_detuned,    // quadratic-in-n part for omega_q >> omega_r: +-6 lambda^4 n^2 / omega_q^3
};

double fourth_order_shift(LevelIndex idx, double lambda, double omega_q, double omega_r,
                          FourthOrderVariant variant = FourthOrderVariant::full);

// Assembles E0 + E2 + E4 rows for n in [0, n_top], both qubit branches.
SpectrumTable perturbative_table(double lambda, double omega_q, double omega_r, int n_top);

// Least-squares fit of E_total(n) over n in [0, n_fit] to zeta + omega n + mu n^2.
// Throws NumericsError if the fit residual exceeds 1e-3 |mu| n_fit^2 (with an
// absolute floor for the exactly-linear lambda = 0 case).
resonator::NonlinearOscParams effective_nonlinear_params(double lambda, double omega_q,
                                                         double omega_r,
                                                         QubitBranch state,
                                                         int n_fit = 6);

struct ExactDiagonalizeOptions {
  int ramp_steps = 8;        // lambda continuation steps (>= 8)
  double min_overlap = 0.7;  // label-tracking threshold
};

// Verification oracle: eigenvalues of H = -(omega_q/2) sigma_z + omega_r (n + 1/2)
// + i lambda sigma_y (a^dagger - a) on the truncated product space, labeled by
// adiabatic continuation of the eigenvectors from lambda = 0.
SpectrumTable exact_diagonalize(double omega_q, double omega_r, double lambda, int n_max,
                                const ExactDiagonalizeOptions& opt = {});

// Fills the e_exact column of `table` from the oracle (n_max chosen from the
// table's top level plus the coupling margin).
void attach_exact(SpectrumTable& table, double lambda, double omega_q, double omega_r);

}  // namespace spinres::spectra
