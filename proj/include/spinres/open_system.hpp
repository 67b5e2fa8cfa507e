#pragma once

#include <utility>
#include <vector>

#include "spinres/ode.hpp"
#include "spinres/quantum.hpp"
#include "spinres/types.hpp"

namespace spinres::open_system {

// Resonator-environment constants: damping through the quality factor Q,
// diffusion D = k_B T / (hbar omega_r).
struct BathParams {
  double quality_factor = 1e12;  // +inf-like default: effectively unitary
  double diffusion = 0.0;

  void validate() const;
};

// Density matrix over the spin x Fock basis (same spin-major layout as
// quantum::SpinorState), dimension 2 (n_max + 1).
struct DensityMatrix {
  CMatX rho;
  int n_max = 0;

  double trace() const { return rho.trace().real(); }
  double hermiticity_error() const { return (rho - rho.adjoint()).norm(); }
  double min_eigenvalue() const;
  double tail_mass() const;
};

// rho(0) = |u_alpha><u_alpha| (x) [[|c0|^2, c0 c1*], [c0* c1, |c1|^2]].
DensityMatrix init_density(Complex alpha, Complex c0, Complex c1, int n_max);

// Generator of the damped evolution in dimensionless time tau = omega_r t:
// d rho/d tau = -i [H(tau/omega_r)/omega_r, rho]
//               - (1/Q) { (i/2) [phi, {q, rho}] + D [phi, [phi, rho]] }.
CMatX master_rhs(const CMatX& rho, double tau, const quantum::QuantumParams& params,
                 const BathParams& bath, int n_max);

struct MasterStats {
  IntegratorStats integrator;
  double max_symmetrization = 0.0;  // largest Hermiticity correction applied
  double max_trace_drift = 0.0;
  double min_eigenvalue_seen = 0.0;
};

struct MasterOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-11;
  double trace_tol = 1e-8;
  double positivity_warn = -1e-6;
  double positivity_abort = -1e-4;
};

// Adaptive integration of the master equation between the sample times (all in
// tau); rho is re-symmetrized at each sample and trace/positivity monitored.
std::vector<DensityMatrix> evolve_master(const DensityMatrix& initial,
                                         const VecX& sample_taus,
                                         const quantum::QuantumParams& params,
                                         const BathParams& bath,
                                         const MasterOptions& options = {},
                                         MasterStats* stats = nullptr);

struct FourPeakSummary {
  double w1 = 0.0;  // on-diagonal branch masses (probabilities)
  double w2 = 0.0;
  double w3 = 0.0;  // off-diagonal coherence masses (Frobenius window mass)
  double w4 = 0.0;
  double peak_1 = 0.0;  // flux positions of the two diagonal peaks
  double peak_2 = 0.0;
  Mat2c spin_1 = Mat2c::Zero();  // window-averaged spin matrices (Tr = w1, w2)
  Mat2c spin_2 = Mat2c::Zero();
  bool resolved = false;
};

// Evaluates rho(phi, phi') on the grid and splits the plane at the density
// minimum between the two diagonal flux peaks: w1/w2 are diagonal probability
// masses, w3/w4 the Frobenius masses of the two off-diagonal quadrants.
FourPeakSummary four_peak_decomposition(const DensityMatrix& rho,
                                        const quantum::FluxGrid& grid);

// Normalized off-diagonal mass w3/sqrt(w1 w2): 1 for a pure cat, decaying to 0
// as the environment removes the flux coherence.
double coherence_metric(const DensityMatrix& rho, const quantum::FluxGrid& grid);

}  // namespace spinres::open_system
