#include "spinres/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "spinres/errors.hpp"
#include "spinres/fock.hpp"
#include "spinres/signal.hpp"

namespace spinres::quantum {

namespace {
constexpr double kRoot2 = 1.4142135623730951;

// Structured application of H(t) without forming the dense matrix:
// per-branch displaced oscillator (diagonal + tridiagonal flux) plus the
// 2x2 spin field acting identically on every Fock level.
struct HamiltonianOp {
  const QuantumParams& p;
  int n_max;
  VecX ladder;  // sqrt((n+1)/2), flux off-diagonal

  HamiltonianOp(const QuantumParams& params, int nmax) : p(params), n_max(nmax) {
    ladder.resize(n_max);
    for (int n = 0; n < n_max; ++n) ladder[n] = std::sqrt((n + 1.0) / 2.0);
  }

  double spectral_bound() const {
    const double flux_norm = std::sqrt(2.0 * (n_max + 1.0));
    return 0.5 * std::abs(p.Omega) + 0.5 * p.omega_R + p.omega_r * (n_max + 0.5) +
           kRoot2 * (std::abs(p.coupling) + std::abs(p.drive_coupling)) * flux_norm;
  }

  void apply(double t, const CVecX& x, CVecX& y) const {
    const int nf = n_max + 1;
    const double bz = p.Omega * std::cos(p.omega_r * t);
    const double cu = kRoot2 * (p.coupling + p.drive_coupling);   // up branch flux factor
    const double cd = kRoot2 * (-p.coupling + p.drive_coupling);  // down branch
    y.resize(2 * nf);
    const Complex ihalf(0.0, 0.5);
    for (int n = 0; n < nf; ++n) {
      const double diag = p.omega_r * (n + 0.5);
      const Complex xu = x[n], xd = x[nf + n];
      Complex yu = (diag - 0.5 * bz) * xu + ihalf * p.omega_R * xd;
      Complex yd = (diag + 0.5 * bz) * xd - ihalf * p.omega_R * xu;
      if (n > 0) {
        yu += cu * ladder[n - 1] * x[n - 1];
        yd += cd * ladder[n - 1] * x[nf + n - 1];
      }
      if (n < n_max) {
        yu += cu * ladder[n] * x[n + 1];
        yd += cd * ladder[n] * x[nf + n + 1];
      }
      y[n] = yu;
      y[nf + n] = yd;
    }
  }

  // exp(-i H(t_frozen) dt) x by scaling-and-Taylor; unitary to machine
  // precision for each substep with |H| dt <= 0.5.
  void expm_apply(double t_frozen, double dt, CVecX& x, CVecX& term, CVecX& tmp) const {
    const double bound = spectral_bound() * std::abs(dt);
    const int nsub = std::max(1, int(std::ceil(bound / 0.5)));
    const double h = dt / nsub;
    for (int s = 0; s < nsub; ++s) {
      term = x;
      for (int k = 1; k <= 40; ++k) {
        apply(t_frozen, term, tmp);
        term = tmp * (Complex(0.0, -1.0) * h / double(k));
        x += term;
        if (term.norm() < 1e-16 * x.norm()) break;
      }
    }
  }
};

}  // namespace

double SpinorState::tail_mass() const {
  const int nf = n_max + 1;
  const int start = nf - std::max(1, nf / 10);
  double tail = 0.0;
  for (int n = start; n < nf; ++n) {
    tail += std::norm(amps[n]) + std::norm(amps[nf + n]);
  }
  const double total = amps.squaredNorm();
  return total > 0.0 ? tail / total : 0.0;
}

double SpinorState::mean_flux() const {
  const int nf = n_max + 1;
  double acc = 0.0;
  for (int s = 0; s < 2; ++s) {
    const int off = s * nf;
    for (int n = 0; n + 1 < nf; ++n) {
      acc += 2.0 * std::sqrt((n + 1.0) / 2.0) *
             (std::conj(amps[off + n]) * amps[off + n + 1]).real();
    }
  }
  return acc;
}

double SpinorState::mean_photons() const {
  const int nf = n_max + 1;
  double acc = 0.0;
  for (int n = 0; n < nf; ++n) {
    acc += n * (std::norm(amps[n]) + std::norm(amps[nf + n]));
  }
  return acc;
}

VecX FluxGrid::points() const {
  const Eigen::Index n = Eigen::Index(std::floor((max - min) / spacing)) + 1;
  VecX g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = min + i * spacing;
  return g;
}

void FluxGrid::validate(double alpha_abs) const {
  if (!(spacing > 0.0) || !(max > min)) throw ValidationError("FluxGrid: malformed grid");
  if (spacing > 0.1 + 1e-12) {
    throw ValidationError("FluxGrid: spacing must be <= 0.1 to resolve the ground width");
  }
  const double extent = kRoot2 * alpha_abs + 6.0;
  if (min > -extent || max < extent) {
    throw ValidationError("FluxGrid: extent must reach sqrt2 |alpha| + 6 on both sides");
  }
}

CMatX build_hamiltonian(double t, const QuantumParams& params, int n_max) {
  const int nf = n_max + 1;
  const MatX phi = fock::flux_operator(n_max);
  CMatX h = CMatX::Zero(2 * nf, 2 * nf);
  const double bz = params.Omega * std::cos(params.omega_r * t);
  const double cu = kRoot2 * (params.coupling + params.drive_coupling);
  const double cd = kRoot2 * (-params.coupling + params.drive_coupling);
  for (int n = 0; n < nf; ++n) {
    h(n, n) = params.omega_r * (n + 0.5) - 0.5 * bz;
    h(nf + n, nf + n) = params.omega_r * (n + 0.5) + 0.5 * bz;
  }
  h.topLeftCorner(nf, nf) += (cu * phi).cast<Complex>();
  h.bottomRightCorner(nf, nf) += (cd * phi).cast<Complex>();
  // -omega_R S_y blocks: S_y = (1/2) [[0, -i], [i, 0]] acting on the spin index.
  const Complex iu(0.0, 1.0);
  h.topRightCorner(nf, nf) += (0.5 * params.omega_R * iu) * CMatX::Identity(nf, nf);
  h.bottomLeftCorner(nf, nf) += (-0.5 * params.omega_R * iu) * CMatX::Identity(nf, nf);
  return h;
}

SpinorState init_spinor(Complex alpha, Complex c0, Complex c1, int n_max) {
  if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > 1e-10) {
    throw ValidationError("init_spinor: spin amplitudes must satisfy |c0|^2+|c1|^2 = 1");
  }
  const CVecX coh = fock::coherent_amplitudes(alpha, n_max);
  SpinorState st;
  st.n_max = n_max;
  st.amps.resize(2 * (n_max + 1));
  st.amps.head(n_max + 1) = c0 * coh;
  st.amps.tail(n_max + 1) = c1 * coh;
  return st;
}

double spectral_bound(const QuantumParams& params, int n_max) {
  return HamiltonianOp(params, n_max).spectral_bound();
}

std::vector<SpinorState> evolve(const SpinorState& initial,
                                std::pair<double, double> t_span,
                                const VecX& sample_times, const QuantumParams& params,
                                const EvolveOptions& options) {
  const HamiltonianOp H(params, initial.n_max);
  const double fastest = std::max({std::abs(params.Omega), params.omega_R,
                                   H.spectral_bound()});
  if (!(options.dt_max > 0.0) || options.dt_max > 1.0001 * 0.1 / fastest) {
    throw ValidationError("evolve: dt_max must satisfy dt_max <= 0.1/max(Omega, omega_R, |H|)");
  }
  const double t0 = t_span.first, t1 = t_span.second;
  const double span = t1 - t0;
  if (!(span > 0.0)) throw ValidationError("evolve: empty time span");

  std::vector<SpinorState> out;
  out.reserve(sample_times.size());

  CVecX psi = initial.amps, full = psi, half = psi, term(psi.size()), tmp(psi.size());
  const double norm0 = psi.norm();
  double t = t0;
  double dt = options.dt_max;
  Eigen::Index isample = 0;
  auto emit = [&](double tcur) {
    while (isample < sample_times.size() && sample_times[isample] <= tcur + 1e-9) {
      SpinorState s;
      s.n_max = initial.n_max;
      s.amps = psi;
      out.push_back(std::move(s));
      isample++;
    }
  };
  emit(t);

  std::uint64_t guard = 0;
  while (t < t1 - 1e-12 * span) {
    if (++guard > 2'000'000'000ULL) throw NumericsError("evolve: step count blow-up");
    double h = std::min(dt, t1 - t);
    // land exactly on the next sample time
    if (isample < sample_times.size() && t + h > sample_times[isample] - 1e-12) {
      h = sample_times[isample] - t;
    }
    if (h <= 1e-14 * span) {
      emit(t + 2e-12 * span);
      continue;
    }
    // one full step vs two half steps, each frozen at its own midpoint
    full = psi;
    H.expm_apply(t + 0.5 * h, h, full, term, tmp);
    half = psi;
    H.expm_apply(t + 0.25 * h, 0.5 * h, half, term, tmp);
    H.expm_apply(t + 0.75 * h, 0.5 * h, half, term, tmp);
    const double err = (full - half).norm();
    const double budget = options.tol * (h / span) * std::max(norm0, 1e-30);
    if (err <= budget || h <= 1e-12 * span) {
      t += h;
      psi.swap(half);
      emit(t);
      const double grow = err > 0.0 ? 0.8 * std::cbrt(budget / err) : 2.0;
      dt = std::min(options.dt_max, h * std::clamp(grow, 0.3, 2.0));
    } else {
      dt = h * std::max(0.3, 0.8 * std::cbrt(budget / err));
    }
  }
  emit(t1 + span);

  // health checks on the final state
  SpinorState fin;
  fin.n_max = initial.n_max;
  fin.amps = psi;
  if (std::abs(psi.norm() - norm0) > options.norm_tol) {
    throw NumericsError("evolve: norm drift exceeded tolerance");
  }
  if (fin.tail_mass() > options.tail_tol) {
    throw TruncationError("evolve: truncation tail mass " + std::to_string(fin.tail_mass()) +
                          " exceeds tolerance; raise n_max");
  }
  return out;
}

FluxDensity flux_density(const SpinorState& state, const FluxGrid& grid, double check_tol) {
  grid.validate();
  FluxDensity out;
  out.grid = grid.points();
  const MatX U = fock::hermite_functions(out.grid, state.n_max);
  const CVecX pu = U * state.up();
  const CVecX pd = U * state.down();
  out.up = pu.cwiseAbs2();
  out.down = pd.cwiseAbs2();
  // component norms must be reproduced by the grid quadrature
  auto trap = [&](const VecX& f) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < f.size(); ++i) {
      acc += 0.5 * (out.grid[i + 1] - out.grid[i]) * (f[i] + f[i + 1]);
    }
    return acc;
  };
  const double nu = state.up().squaredNorm(), nd = state.down().squaredNorm();
  if (std::abs(trap(out.up) - nu) > check_tol || std::abs(trap(out.down) - nd) > check_tol) {
    throw NumericsError("flux_density: grid quadrature does not reproduce component norms");
  }
  return out;
}

Vec2c field_eigenvector(double by, double bz, QubitBranch branch) {
  Mat2c bs;
  bs << 0.5 * bz, Complex(0.0, -0.5) * by, Complex(0.0, 0.5) * by, -0.5 * bz;
  Eigen::SelfAdjointEigenSolver<Mat2c> es(bs);
  // eigenvalues ascending: column 1 is +|b|/2
  return branch == QubitBranch::ground ? es.eigenvectors().col(1)
                                       : es.eigenvectors().col(0);
}

BranchDecomposition decompose_branches(const SpinorState& state, double t,
                                       const QuantumParams& params, const FluxGrid& grid) {
  const FluxDensity dens = flux_density(state, grid);
  const VecX total = dens.total();
  const auto peaks = signal::find_peaks(total, dens.grid, 1e-3 * total.maxCoeff());

  BranchDecomposition out;
  Eigen::Index split = 0;
  double pa = 0.0, pb = 0.0;
  if (peaks.size() >= 2) {
    // two most prominent
    auto byprom = peaks;
    std::sort(byprom.begin(), byprom.end(),
              [](const auto& a, const auto& b) { return a.prominence > b.prominence; });
    auto p1 = byprom[0], p2 = byprom[1];
    if (p1.index > p2.index) std::swap(p1, p2);
    pa = p1.position;
    pb = p2.position;
    split = p1.index;
    for (Eigen::Index i = p1.index; i <= p2.index; ++i) {
      if (total[i] < total[split]) split = i;
    }
    out.reliable = (pb - pa) > 2.0;
  } else if (peaks.size() == 1) {
    pa = pb = peaks[0].position;
    split = peaks[0].index;
    out.reliable = false;
  } else {
    throw NumericsError("decompose_branches: no density peaks found");
  }

  const MatX U = fock::hermite_functions(dens.grid, state.n_max);
  const CVecX pu = U * state.up();
  const CVecX pd = U * state.down();
  const double h = grid.spacing;
  auto window_reduced = [&](Eigen::Index lo, Eigen::Index hi) {
    Mat2c r = Mat2c::Zero();
    for (Eigen::Index i = lo; i <= hi; ++i) {
      const double w = (i == lo || i == hi) ? 0.5 * h : h;
      r(0, 0) += w * std::norm(pu[i]);
      r(1, 1) += w * std::norm(pd[i]);
      r(0, 1) += w * pu[i] * std::conj(pd[i]);
    }
    r(1, 0) = std::conj(r(0, 1));
    return r;
  };
  const Mat2c ra = window_reduced(0, split);
  const Mat2c rb = window_reduced(split, total.size() - 1);
  auto principal = [](const Mat2c& r) {
    Eigen::SelfAdjointEigenSolver<Mat2c> es(r);
    return Vec2c(es.eigenvectors().col(1));
  };
  double wa = ra.trace().real();
  double wb = rb.trace().real();
  Vec2c ca = principal(ra), cb = principal(rb);

  // assign branch a to the field-aligned spinor at its peak
  const double bz_a = params.Omega * std::cos(params.omega_r * t) - 2.0 * kRoot2 * params.coupling * pa;
  const double bz_b = params.Omega * std::cos(params.omega_r * t) - 2.0 * kRoot2 * params.coupling * pb;
  const Vec2c up_a = field_eigenvector(params.omega_R, bz_a, QubitBranch::ground);
  const Vec2c up_b = field_eigenvector(params.omega_R, bz_b, QubitBranch::ground);
  const double match_a = std::abs(up_a.dot(ca));
  const double match_b = std::abs(up_b.dot(cb));
  if (match_b > match_a) {
    std::swap(wa, wb);
    std::swap(ca, cb);
    std::swap(pa, pb);
  }
  out.w_a = wa;
  out.w_b = wb;
  out.peak_a = pa;
  out.peak_b = pb;
  out.chi_a = ca;
  out.chi_b = cb;
  return out;
}

}  // namespace spinres::quantum
