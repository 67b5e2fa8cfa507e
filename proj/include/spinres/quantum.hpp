#pragma once

#include <utility>
#include <vector>

#include "spinres/types.hpp"

namespace spinres::quantum {

// Rotating-frame parameters of the spin-resonator Hamiltonian
// H(t) = -Omega cos(w_r t) S_z + w_r (n + 1/2) - w_R S_y + sqrt2 (2 Lambda S_z + lambda') phi.
struct QuantumParams {
  double omega_r = 0.0;
  double omega_R = 0.0;
  double Omega = 0.0;         // 0 in resonator-drive mode
  double coupling = 0.0;      // Lambda
  double drive_coupling = 0.0;  // lambda'
};

// Complex amplitudes over |s> x |n>, spin-major layout: [up(0..n_max), down(0..n_max)].
struct SpinorState {
  CVecX amps;
  int n_max = 0;

  Eigen::Index dim() const { return amps.size(); }
  double norm() const { return amps.norm(); }
  // Fraction of probability in the top 10% of Fock levels (truncation health).
  double tail_mass() const;
  double mean_flux() const;
  double mean_photons() const;
  Eigen::Ref<const CVecX> up() const { return amps.head(n_max + 1); }
  Eigen::Ref<const CVecX> down() const { return amps.tail(n_max + 1); }
};

// Uniform flux grid. The extent must reach sqrt2 |alpha| + 6 beyond the origin
// on both sides and the spacing must resolve the oscillator ground width.
struct FluxGrid {
  double min = -10.0;
  double max = 10.0;
  double spacing = 0.05;

  VecX points() const;
  void validate(double alpha_abs = 0.0) const;
};

// Dense H(t) on the truncated space. The oscillator ladder is kept exact
// (number operator), only the coupling flux operator feels the truncation.
CMatX build_hamiltonian(double t, const QuantumParams& params, int n_max);

// Upper estimate of the spectral radius of H(t) over a drive cycle; the
// propagation step cap is 0.1 / max(Omega, omega_R, spectral_bound).
double spectral_bound(const QuantumParams& params, int n_max);

// Coherent resonator state tensored with the (c0, c1) spinor; |c0|^2 + |c1|^2 = 1.
SpinorState init_spinor(Complex alpha, Complex c0, Complex c1, int n_max);

struct EvolveOptions {
  double dt_max = 0.0;   // required: <= 0.1 / max(Omega, omega_R, spectral radius)
  double tol = 1e-8;     // accumulated time-ordering error budget
  double norm_tol = 1e-8;
  double tail_tol = 1e-6;
};

// Norm-preserving propagation of i psi' = H(t) psi: midpoint-frozen H per
// step applied through a unitary (scaled Taylor) exponential, with
// step-halving error control. Returns the states at `sample_times`.
std::vector<SpinorState> evolve(const SpinorState& initial,
                                std::pair<double, double> t_span,
                                const VecX& sample_times, const QuantumParams& params,
                                const EvolveOptions& options);

struct FluxDensity {
  VecX grid;
  VecX up;
  VecX down;

  VecX total() const { return up + down; }
};

// |psi_s(phi)|^2 per spin component on the grid; the sampled densities must
// integrate back to the component norms within `check_tol`.
FluxDensity flux_density(const SpinorState& state, const FluxGrid& grid,
                         double check_tol = 1e-4);

struct BranchDecomposition {
  double w_a = 0.0;  // field-aligned branch weight
  double w_b = 0.0;
  double peak_a = 0.0;  // flux position of each branch peak
  double peak_b = 0.0;
  Vec2c chi_a = Vec2c::Zero();
  Vec2c chi_b = Vec2c::Zero();
  bool reliable = false;  // false when the peaks are closer than 2 flux units
};

// Splits the state at the density minimum between the two flux peaks, returns
// the window masses and the principal spinor of each window. Branch a is the
// window whose spinor best matches the +1/2 eigenvector of B(phi_peak) . S.
BranchDecomposition decompose_branches(const SpinorState& state, double t,
                                       const QuantumParams& params, const FluxGrid& grid);

// +-1/2 eigenvectors of (b . S) for b = (0, by, bz).
Vec2c field_eigenvector(double by, double bz, QubitBranch branch);

}  // namespace spinres::quantum
