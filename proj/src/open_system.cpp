#include "spinres/open_system.hpp"

#include <algorithm>
#include <cmath>

#include "spinres/errors.hpp"
#include "spinres/fock.hpp"
#include "spinres/signal.hpp"

namespace spinres::open_system {

namespace {

// I2 (x) op on the spin-major product space.
CMatX lift_resonator(const CMatX& op) {
  const Eigen::Index nf = op.rows();
  CMatX out = CMatX::Zero(2 * nf, 2 * nf);
  out.topLeftCorner(nf, nf) = op;
  out.bottomRightCorner(nf, nf) = op;
  return out;
}

}  // namespace

void BathParams::validate() const {
  if (!(quality_factor > 0.0)) throw ValidationError("BathParams: Q must be positive");
  if (diffusion < 0.0) throw ValidationError("BathParams: D must be >= 0");
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatX> es(0.5 * (rho + rho.adjoint()));
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::tail_mass() const {
  const int nf = n_max + 1;
  const int start = nf - std::max(1, nf / 10);
  double tail = 0.0;
  for (int n = start; n < nf; ++n) {
    tail += rho(n, n).real() + rho(nf + n, nf + n).real();
  }
  const double total = trace();
  return total > 0.0 ? tail / total : 0.0;
}

DensityMatrix init_density(Complex alpha, Complex c0, Complex c1, int n_max) {
  if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > 1e-10) {
    throw ValidationError("init_density: spin part must satisfy |c0|^2+|c1|^2 = 1");
  }
  const CVecX u = fock::coherent_amplitudes(alpha, n_max);
  const CMatX flux_part = u * u.adjoint();
  Mat2c spin;
  spin << std::norm(c0), c0 * std::conj(c1), std::conj(c0) * c1, std::norm(c1);
  const Eigen::Index nf = n_max + 1;
  DensityMatrix out;
  out.n_max = n_max;
  out.rho.resize(2 * nf, 2 * nf);
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      out.rho.block(s * nf, sp * nf, nf, nf) = spin(s, sp) * flux_part;
    }
  }
  return out;
}

CMatX master_rhs(const CMatX& rho, double tau, const quantum::QuantumParams& params,
                 const BathParams& bath, int n_max) {
  bath.validate();
  if (!(params.omega_r > 0.0)) throw ValidationError("master_rhs: omega_r must be positive");
  const double t = tau / params.omega_r;
  const CMatX h = quantum::build_hamiltonian(t, params, n_max) / params.omega_r;
  const Complex mi(0.0, -1.0);
  CMatX rhs = mi * (h * rho - rho * h);
  const double damping = 1.0 / bath.quality_factor;
  if (damping > 0.0) {
    const CMatX phi = lift_resonator(fock::flux_operator(n_max).cast<Complex>());
    const CMatX q = lift_resonator(fock::charge_operator(n_max));
    const CMatX anti = q * rho + rho * q;
    const CMatX drag = Complex(0.0, 0.5) * (phi * anti - anti * phi);
    const CMatX dbl = phi * (phi * rho) - 2.0 * phi * rho * phi + (rho * phi) * phi;
    rhs -= damping * (drag + bath.diffusion * dbl);
  }
  return rhs;
}

std::vector<DensityMatrix> evolve_master(const DensityMatrix& initial,
                                         const VecX& sample_taus,
                                         const quantum::QuantumParams& params,
                                         const BathParams& bath,
                                         const MasterOptions& options,
                                         MasterStats* stats) {
  if (sample_taus.size() < 2) {
    throw ValidationError("evolve_master: need at least two sample times");
  }
  const Eigen::Index dim = initial.rho.rows();
  const double trace0 = initial.trace();
  MasterStats local;
  MasterStats& st = stats ? *stats : local;
  st.min_eigenvalue_seen = 0.0;

  auto rhs = [&](double tau, const VecX& y, VecX& dy) {
    const Eigen::Map<const CMatX> rho(reinterpret_cast<const Complex*>(y.data()), dim, dim);
    const CMatX d = master_rhs(rho, tau, params, bath, initial.n_max);
    dy.resize(y.size());
    Eigen::Map<CMatX>(reinterpret_cast<Complex*>(dy.data()), dim, dim) = d;
  };

  VecX y(2 * dim * dim);
  Eigen::Map<CMatX>(reinterpret_cast<Complex*>(y.data()), dim, dim) = initial.rho;

  std::vector<DensityMatrix> out;
  out.reserve(sample_taus.size());
  DensityMatrix first = initial;
  out.push_back(first);

  OdeOptions oopt;
  oopt.rel_tol = options.rel_tol;
  oopt.abs_tol = options.abs_tol;

  for (Eigen::Index i = 0; i + 1 < sample_taus.size(); ++i) {
    VecX seg(2);
    seg << sample_taus[i], sample_taus[i + 1];
    VecX ends(1);
    ends << sample_taus[i + 1];
    Trajectory tr = ode_solve(rhs, y, {sample_taus[i], sample_taus[i + 1]}, ends, oopt);
    st.integrator.steps += tr.stats.steps;
    st.integrator.rejected += tr.stats.rejected;
    st.integrator.rhs_evals += tr.stats.rhs_evals;
    y = tr.states.col(0);

    DensityMatrix dm;
    dm.n_max = initial.n_max;
    dm.rho = Eigen::Map<const CMatX>(reinterpret_cast<const Complex*>(y.data()), dim, dim);
    const double herm = dm.hermiticity_error();
    st.max_symmetrization = std::max(st.max_symmetrization, herm);
    dm.rho = 0.5 * (dm.rho + dm.rho.adjoint()).eval();
    Eigen::Map<CMatX>(reinterpret_cast<Complex*>(y.data()), dim, dim) = dm.rho;

    const double drift = std::abs(dm.trace() - trace0);
    st.max_trace_drift = std::max(st.max_trace_drift, drift);
    if (drift > options.trace_tol) {
      throw NumericsError("evolve_master: trace drift " + std::to_string(drift));
    }
    const double mineig = dm.min_eigenvalue();
    st.min_eigenvalue_seen = std::min(st.min_eigenvalue_seen, mineig);
    if (mineig < options.positivity_abort) {
      throw NumericsError("evolve_master: positivity violation " + std::to_string(mineig));
    }
    if (dm.tail_mass() > 1e-6) {
      throw TruncationError("evolve_master: truncation tail mass too large; raise n_max");
    }
    out.push_back(std::move(dm));
  }
  return out;
}

FourPeakSummary four_peak_decomposition(const DensityMatrix& dm,
                                        const quantum::FluxGrid& grid) {
  grid.validate();
  const VecX g = grid.points();
  const Eigen::Index m = g.size();
  const Eigen::Index nf = dm.n_max + 1;
  const MatX u = fock::hermite_functions(g, dm.n_max);

  // spin blocks mapped to the flux plane: G[s][sp](x, x')
  CMatX gblk[2][2];
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      gblk[s][sp] = u * dm.rho.block(s * nf, sp * nf, nf, nf) * u.transpose();
    }
  }
  VecX diag(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    diag[i] = (gblk[0][0](i, i) + gblk[1][1](i, i)).real();
  }

  FourPeakSummary out;
  auto peaks = signal::find_peaks(diag, g, 1e-3 * diag.maxCoeff());
  Eigen::Index split;
  if (peaks.size() >= 2) {
    std::sort(peaks.begin(), peaks.end(),
              [](const auto& a, const auto& b) { return a.prominence > b.prominence; });
    auto p1 = peaks[0], p2 = peaks[1];
    if (p1.index > p2.index) std::swap(p1, p2);
    out.peak_1 = p1.position;
    out.peak_2 = p2.position;
    split = p1.index;
    for (Eigen::Index i = p1.index; i <= p2.index; ++i) {
      if (diag[i] < diag[split]) split = i;
    }
    out.resolved = (out.peak_2 - out.peak_1) > 2.0;
  } else if (peaks.size() == 1) {
    out.peak_1 = out.peak_2 = peaks[0].position;
    split = peaks[0].index;
    out.resolved = false;
  } else {
    throw NumericsError("four_peak_decomposition: no diagonal peaks found");
  }

  const double h = grid.spacing;
  VecX w = VecX::Constant(m, h);
  w[0] = w[m - 1] = 0.5 * h;

  auto diag_mass = [&](Eigen::Index lo, Eigen::Index hi, Mat2c& spin) {
    double acc = 0.0;
    spin.setZero();
    for (Eigen::Index i = lo; i <= hi; ++i) {
      const double wi = (i == lo || i == hi) ? 0.5 * h : h;
      acc += wi * (gblk[0][0](i, i) + gblk[1][1](i, i)).real();
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) spin(s, sp) += wi * gblk[s][sp](i, i);
      }
    }
    return acc;
  };
  out.w1 = diag_mass(0, split, out.spin_1);
  out.w2 = diag_mass(split, m - 1, out.spin_2);

  // Frobenius window mass over an off-diagonal quadrant:
  // sqrt( int_{Wa x Wb} sum_{s,s'} |rho_{ss'}(x, x')|^2 dx dx' ).
  auto coh_mass = [&](Eigen::Index alo, Eigen::Index ahi, Eigen::Index blo,
                      Eigen::Index bhi) {
    double acc = 0.0;
    for (Eigen::Index i = alo; i <= ahi; ++i) {
      const double wi = (i == alo || i == ahi) ? 0.5 * h : h;
      for (Eigen::Index j = blo; j <= bhi; ++j) {
        const double wj = (j == blo || j == bhi) ? 0.5 * h : h;
        double f2 = 0.0;
        for (int s = 0; s < 2; ++s) {
          for (int sp = 0; sp < 2; ++sp) f2 += std::norm(gblk[s][sp](i, j));
        }
        acc += wi * wj * f2;
      }
    }
    return std::sqrt(acc);
  };
  out.w3 = coh_mass(0, split, split, m - 1);
  out.w4 = coh_mass(split, m - 1, 0, split);
  return out;
}

double coherence_metric(const DensityMatrix& rho, const quantum::FluxGrid& grid) {
  const FourPeakSummary s = four_peak_decomposition(rho, grid);
  if (s.w1 * s.w2 < 1e-12) {
    throw NumericsError("coherence_metric: diagonal masses below the division floor");
  }
  return s.w3 / std::sqrt(s.w1 * s.w2);
}

}  // namespace spinres::open_system
