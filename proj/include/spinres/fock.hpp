#pragma once

#include <cmath>

#include "spinres/errors.hpp"
#include "spinres/types.hpp"

namespace spinres::fock {

// Creation operator a^dagger on the truncated space {|0> .. |n_max>}.
MatX creation(int n_max);

// Dimensionless flux phi = (a^dagger + a)/sqrt2 and charge q = i(a^dagger - a)/sqrt2.
MatX flux_operator(int n_max);
CMatX charge_operator(int n_max);

// Coherent-state amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!).
CVecX coherent_amplitudes(Complex alpha, int n_max);

// Oscillator eigenfunctions u_n(phi) evaluated on a grid, u_0 = pi^{-1/4} e^{-phi^2/2},
// via the normalized three-term recurrence. Column n holds u_n.
MatX hermite_functions(const VecX& grid, int n_max);

// Default truncation for holding a coherent state of mean photon number nbar:
// ceil(nbar + 10 sqrt(nbar) + 20), keeping the Poisson tail below ~1e-12.
int default_n_max(double nbar);

// Fraction of |amps|^2 carried by the top `fraction` of the Fock levels.
double tail_mass(const CVecX& amps, double fraction = 0.1);

}  // namespace spinres::fock
