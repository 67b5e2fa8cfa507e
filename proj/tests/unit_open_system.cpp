#include <doctest.h>

#include <cmath>
#include <random>

#include "spinres/errors.hpp"
#include "spinres/fock.hpp"
#include "spinres/open_system.hpp"
#include "spinres/quantum.hpp"

using namespace spinres;
using namespace spinres::open_system;

namespace {

const double kRoot2 = std::sqrt(2.0);

VecX linspace(double a, double b, int n) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1.0);
  return v;
}

quantum::FluxGrid default_grid(double reach) {
  quantum::FluxGrid g;
  g.min = -(reach + 6.5);
  g.max = reach + 6.5;
  g.spacing = 0.05;
  return g;
}

// Two displaced branches with orthogonal-ish spin parts and coherence factor
// `gamma` (1 = pure cat, 0 = fully decohered).
DensityMatrix make_cat(double sep_alpha, Complex c0, Complex c1, double gamma,
                       int n_max) {
  const Complex a(sep_alpha, 0.0);
  const CVecX ua = fock::coherent_amplitudes(a, n_max);
  const CVecX ub = fock::coherent_amplitudes(-a, n_max);
  const Eigen::Index nf = n_max + 1;
  CVecX va = CVecX::Zero(2 * nf), vb = CVecX::Zero(2 * nf);
  va.head(nf) = ua;   // branch a carries spin up
  vb.tail(nf) = ub;   // branch b carries spin down
  DensityMatrix rho;
  rho.n_max = n_max;
  rho.rho = std::norm(c0) * va * va.adjoint() + std::norm(c1) * vb * vb.adjoint() +
            gamma * (c0 * std::conj(c1) * va * vb.adjoint() +
                     std::conj(c0) * c1 * vb * va.adjoint());
  return rho;
}

}  // namespace

TEST_CASE("init_density: purity, partial trace, flux diagonal") {
  const Complex alpha(1.0, 0.4);
  const Complex c0(0.8, 0.0), c1(0.0, 0.6);
  const int n_max = fock::default_n_max(2.0);
  const auto dm = init_density(alpha, c0, c1, n_max);
  CHECK(dm.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dm.hermiticity_error() < 1e-14);
  // purity of the pure product state
  CHECK((dm.rho * dm.rho).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  // partial trace over the resonator reproduces the spin matrix
  const Eigen::Index nf = n_max + 1;
  Mat2c spin = Mat2c::Zero();
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      spin(s, sp) = dm.rho.block(s * nf, sp * nf, nf, nf).trace();
    }
  }
  CHECK(std::abs(spin(0, 0) - Complex(std::norm(c0), 0.0)) < 1e-12);
  CHECK(std::abs(spin(0, 1) - c0 * std::conj(c1)) < 1e-12);
  CHECK(std::abs(spin(1, 1) - Complex(std::norm(c1), 0.0)) < 1e-12);
  // flux diagonal matches |u_alpha(phi)|^2 (times the spin populations)
  const auto grid = default_grid(kRoot2 * std::abs(alpha));
  const VecX g = grid.points();
  const MatX u = fock::hermite_functions(g, n_max);
  const CMatX blk = u * dm.rho.topLeftCorner(nf, nf) * u.transpose();
  for (Eigen::Index i = 0; i < g.size(); i += 50) {
    const double expect =
        std::norm(c0) *
        std::exp(-(g[i] - kRoot2 * alpha.real()) * (g[i] - kRoot2 * alpha.real())) /
        std::sqrt(M_PI);
    CHECK(std::abs(blk(i, i).real() - expect) < 1e-8);
  }
  CHECK_THROWS_AS(init_density(alpha, 1.0, 1.0, 8), ValidationError);
}

TEST_CASE("master_rhs: trace-free bath terms and moment identities") {
  std::mt19937 rng(5);
  std::normal_distribution<double> gauss;
  const int n_max = 10;
  const Eigen::Index dim = 2 * (n_max + 1);
  CMatX m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  }
  CMatX rho = m * m.adjoint();
  // keep the state well inside the truncation so the moment identities hold
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int n = int(i % (n_max + 1));
    rho.row(i) *= std::exp(-0.9 * n);
    rho.col(i) *= std::exp(-0.9 * n);
  }
  rho /= rho.trace();

  quantum::QuantumParams p{1.0, 0.2, 0.0, 0.05, 0.0};
  BathParams bath{10.0, 2.0};
  const double D = 2.0, Q = 10.0;
  const CMatX rhs = master_rhs(rho, 0.3, p, bath, n_max);
  CHECK(std::abs(rhs.trace()) < 1e-12);

  const Eigen::Index nf = n_max + 1;
  CMatX phi2 = CMatX::Zero(dim, dim), q2 = CMatX::Zero(dim, dim);
  const MatX phi1 = fock::flux_operator(n_max);
  const CMatX q1 = fock::charge_operator(n_max);
  phi2.topLeftCorner(nf, nf) = (phi1 * phi1).cast<Complex>();
  phi2.bottomRightCorner(nf, nf) = (phi1 * phi1).cast<Complex>();
  q2.topLeftCorner(nf, nf) = q1 * q1;
  q2.bottomRightCorner(nf, nf) = q1 * q1;

  // isolate the generator pieces by differencing runs of master_rhs
  BathParams nobath{1e18, 0.0};
  BathParams dragonly{Q, 0.0};
  const CMatX unitary_part = master_rhs(rho, 0.3, p, nobath, n_max);
  const CMatX bath_part = rhs - unitary_part;
  const CMatX diffusion_part = rhs - master_rhs(rho, 0.3, p, dragonly, n_max);
  CHECK(std::abs(bath_part.trace()) < 1e-12);

  // diffusion alone: d<q^2>/dtau = +2D/Q, d<phi^2>/dtau = 0
  CHECK((q2 * diffusion_part).trace().real() ==
        doctest::Approx(2.0 * D / Q).epsilon(1e-6));
  CHECK(std::abs((phi2 * diffusion_part).trace().real()) < 1e-8);
  // full bath: the drag adds -2<q^2>/Q to d<q^2> and leaves d<phi^2> untouched
  const double q2mean = (q2 * rho).trace().real();
  CHECK((q2 * bath_part).trace().real() ==
        doctest::Approx(2.0 * D / Q - 2.0 * q2mean / Q).epsilon(1e-5));
  CHECK(std::abs((phi2 * bath_part).trace().real()) < 1e-6);
}

TEST_CASE("fock generator matches the coordinate-space finite-difference generator") {
  // state supported on 9 levels, generator padded so the test state is
  // interior to the truncation
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss;
  const int n_state = 8;
  const int n_pad = n_state + 4;
  const Eigen::Index nf = n_pad + 1;
  CMatX flux_rho = CMatX::Zero(nf, nf);
  {
    Eigen::MatrixXcd A(n_state + 1, 3);
    for (int i = 0; i <= n_state; ++i) {
      for (int j = 0; j < 3; ++j) A(i, j) = Complex(gauss(rng), gauss(rng));
      A.row(i) *= std::exp(-0.5 * i);
    }
    flux_rho.topLeftCorner(n_state + 1, n_state + 1) = A * A.adjoint();
    flux_rho /= flux_rho.trace();
  }
  const double D = 2.0, Q = 10.0;
  const MatX phi = fock::flux_operator(n_pad);
  const CMatX q = fock::charge_operator(n_pad);
  const CMatX phic = phi.cast<Complex>();
  const CMatX anti = q * flux_rho + flux_rho * q;
  const CMatX fock_rhs =
      -(1.0 / Q) * (Complex(0.0, 0.5) * (phic * anti - anti * phic) +
                    D * (phic * phic * flux_rho - 2.0 * phic * flux_rho * phic +
                         flux_rho * phic * phic));

  // coordinate representation on a fine grid, 4th-order central differences
  const double h = 0.02, ext = 8.0;
  const Eigen::Index m = Eigen::Index(2 * ext / h) + 1;
  VecX g(m);
  for (Eigen::Index i = 0; i < m; ++i) g[i] = -ext + i * h;
  const MatX u = fock::hermite_functions(g, n_pad);
  const CMatX rg = u * flux_rho * u.transpose();
  const CMatX fock_on_grid = u * fock_rhs * u.transpose();

  auto d4 = [&](const CMatX& a, bool along_rows) {
    CMatX out = CMatX::Zero(m, m);
    for (Eigen::Index i = 2; i + 2 < m; ++i) {
      if (along_rows) {
        out.row(i) = (-a.row(i + 2) + 8.0 * a.row(i + 1) - 8.0 * a.row(i - 1) +
                      a.row(i - 2)) /
                     (12.0 * h);
      } else {
        out.col(i) = (-a.col(i + 2) + 8.0 * a.col(i + 1) - 8.0 * a.col(i - 1) +
                      a.col(i - 2)) /
                     (12.0 * h);
      }
    }
    return out;
  };
  const CMatX dx = d4(rg, true);
  const CMatX dxp = d4(rg, false);
  double worst = 0.0, scale = 0.0;
  for (Eigen::Index i = 3; i + 3 < m; ++i) {
    for (Eigen::Index j = 3; j + 3 < m; ++j) {
      const double xx = g[i] - g[j];
      const Complex grid_rhs =
          -(1.0 / Q) * (0.5 * xx * (dx(i, j) - dxp(i, j)) + D * xx * xx * rg(i, j));
      worst = std::max(worst, std::abs(grid_rhs - fock_on_grid(i, j)));
      scale = std::max(scale, std::abs(fock_on_grid(i, j)));
    }
  }
  CHECK(worst / scale < 1e-6);
}

TEST_CASE("evolve_master: bath off reproduces unitary evolution") {
  quantum::QuantumParams p{0.5, 0.3, 0.0, 0.05, 0.0};
  const int n_max = 14;
  const Complex c0(1.0 / kRoot2, 0.0), c1(0.0, 1.0 / kRoot2);
  const auto rho0 = init_density(Complex(0.8, 0.0), c0, c1, n_max);
  BathParams nobath{1e15, 0.0};
  const VecX taus = linspace(0.0, 8.0, 5);
  const auto rhos = evolve_master(rho0, taus, p, nobath, MasterOptions{});

  // pure-state propagation oracle
  auto st = quantum::init_spinor(Complex(0.8, 0.0), c0, c1, n_max);
  quantum::EvolveOptions qo;
  qo.dt_max = 0.1 / std::max({p.omega_R, quantum::spectral_bound(p, n_max)});
  qo.tol = 1e-10;
  VecX times = taus / p.omega_r;  // evolve works in lab time
  std::vector<double> tv(times.data(), times.data() + times.size());
  VecX times_tail(4);
  for (int i = 0; i < 4; ++i) times_tail[i] = tv[i + 1];
  const auto states = quantum::evolve(st, {0.0, tv[4]}, times_tail, p, qo);
  for (int i = 0; i < 4; ++i) {
    const CMatX pure = states[i].amps * states[i].amps.adjoint();
    // trace distance: (1/2) sum of singular values of the difference
    Eigen::JacobiSVD<CMatX> svd(rhos[i + 1].rho - pure);
    CHECK(0.5 * svd.singularValues().sum() < 1e-6);
  }
}

TEST_CASE("evolve_master: damped free oscillator envelope e^{-tau/2Q}") {
  quantum::QuantumParams p{1.0, 0.0, 0.0, 0.0, 0.0};
  p.omega_R = 1e-9;  // no spin dynamics; spin sector is a spectator
  const int n_max = 24;
  const auto rho0 = init_density(Complex(1.5, 0.0), 1.0, 0.0, n_max);
  BathParams bath{20.0, 0.0};
  const double Q = 20.0;
  const VecX taus = linspace(0.0, 3.0 * 2.0 * Q, 25);  // three decay times
  const auto rhos = evolve_master(rho0, taus, p, bath, MasterOptions{});
  const Eigen::Index nf = n_max + 1;
  const CMatX phi = fock::flux_operator(n_max).cast<Complex>();
  const CMatX q = fock::charge_operator(n_max);
  for (int i = 1; i < 25; ++i) {
    const CMatX blk = rhos[i].rho.topLeftCorner(nf, nf);
    const double mp = (phi * blk).trace().real();
    const double mq = (q * blk).trace().real();
    const double envelope = std::hypot(mp, mq);
    const double expect = kRoot2 * 1.5 * std::exp(-taus[i] / (2.0 * Q));
    CHECK(envelope == doctest::Approx(expect).epsilon(0.05));
  }
}

TEST_CASE("evolve_master: coherence lifetime shrinks as D grows") {
  quantum::QuantumParams p{1.0, 1e-9, 0.0, 0.0, 0.0};
  const int n_max = 26;
  const auto grid = default_grid(kRoot2 * 2.0);
  std::vector<double> lifetime;
  for (double D : {1.0, 3.0, 10.0}) {
    auto rho0 = make_cat(2.0, Complex(1.0 / kRoot2, 0.0), Complex(1.0 / kRoot2, 0.0),
                         1.0, n_max);
    BathParams bath{50.0, D};
    const VecX taus = linspace(0.0, 1.2, 13);
    const auto rhos = evolve_master(rho0, taus, p, bath, MasterOptions{});
    double tau_half = taus[12];
    for (int i = 0; i < 13; ++i) {
      if (coherence_metric(rhos[i], grid) < 0.5) {
        tau_half = taus[i];
        break;
      }
    }
    lifetime.push_back(tau_half);
  }
  CHECK(lifetime[0] > lifetime[1]);
  CHECK(lifetime[1] > lifetime[2]);
}

TEST_CASE("four_peak_decomposition: pure cat and decohered limits") {
  const int n_max = 30;
  const auto grid = default_grid(kRoot2 * 2.2);
  const Complex c0(0.8, 0.0), c1(0.6, 0.0);
  // pure cat: full coherence, w3 = w4, metric ~ 1
  {
    const auto rho = make_cat(2.2, c0, c1, 1.0, n_max);
    const auto fp = four_peak_decomposition(rho, grid);
    CHECK(fp.resolved);
    CHECK(std::abs(fp.w3 - fp.w4) < 1e-8);
    CHECK(fp.w1 + fp.w2 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(coherence_metric(rho, grid) == doctest::Approx(1.0).epsilon(0.01));
    // peak coordinates at +-sqrt2 * 2.2 (branch a carries |c0|^2 at +)
    CHECK(std::abs(std::abs(fp.peak_1) - kRoot2 * 2.2) < 0.05);
    CHECK(std::abs(std::abs(fp.peak_2) - kRoot2 * 2.2) < 0.05);
    // window-averaged spin matrices reproduce the branch projectors
    CHECK(fp.spin_2(0, 0).real() == doctest::Approx(std::norm(c0)).epsilon(0.02));
    CHECK(fp.spin_1(1, 1).real() == doctest::Approx(std::norm(c1)).epsilon(0.02));
  }
  // fully decohered: off-diagonal mass gone, populations intact
  {
    const auto rho = make_cat(2.2, c0, c1, 0.0, n_max);
    const auto fp = four_peak_decomposition(rho, grid);
    CHECK(fp.w3 < 0.01);
    CHECK(fp.w4 < 0.01);
    const double wa = std::max(fp.w1, fp.w2), wb = std::min(fp.w1, fp.w2);
    CHECK(std::abs(wa - std::norm(c0)) < 0.05);
    CHECK(std::abs(wb - std::norm(c1)) < 0.05);
  }
}

TEST_CASE("coherence decay rate grows with D (Delta phi)^2 / Q") {
  quantum::QuantumParams p{1.0, 1e-9, 0.0, 0.0, 0.0};
  const int n_max = 34;
  auto rate_of = [&](double sep_alpha, double D, double Q) {
    const auto grid = default_grid(kRoot2 * sep_alpha);
    auto rho0 = make_cat(sep_alpha, Complex(1.0 / kRoot2, 0.0),
                         Complex(1.0 / kRoot2, 0.0), 1.0, n_max);
    BathParams bath{Q, D};
    // short horizon so the peaks stay separated while the coherence decays
    const VecX taus = linspace(0.0, 0.06, 7);
    const auto rhos = evolve_master(rho0, taus, p, bath, MasterOptions{});
    std::vector<double> logc;
    for (const auto& r : rhos) logc.push_back(std::log(coherence_metric(r, grid)));
    // monotone decay
    for (size_t i = 1; i < logc.size(); ++i) CHECK(logc[i] <= logc[i - 1] + 0.02);
    return (logc.front() - logc.back()) / (taus[6] - taus[0]);
  };
  // rate ~ D (Delta phi)^2 / Q: increases with D and with the separation
  const double r1 = rate_of(1.5, 1.0, 50.0);
  const double r3 = rate_of(1.5, 3.0, 50.0);
  const double r10 = rate_of(1.5, 10.0, 50.0);
  CHECK(r3 > r1);
  CHECK(r10 > r3);
  const double rwide = rate_of(2.5, 3.0, 50.0);
  CHECK(rwide > r3);
  // quantitative slope: the double-commutator predicts rate = D (dphi)^2 / Q
  // with dphi = 2 sqrt2 alpha the peak separation
  const double dphi = 2.0 * kRoot2 * 1.5;
  CHECK(r3 == doctest::Approx(3.0 * dphi * dphi / 50.0).epsilon(0.2));
}

TEST_CASE("positivity monitor aborts on a broken state") {
  // a state with a negative eigenvalue beyond the floor is rejected on entry
  const int n_max = 6;
  auto rho0 = init_density(0.0, 1.0, 0.0, n_max);
  rho0.rho(1, 1) = -2e-3;  // inject a violation
  quantum::QuantumParams p{1.0, 0.1, 0.0, 0.0, 0.0};
  BathParams bath{10.0, 0.0};
  const VecX taus = linspace(0.0, 0.2, 3);
  CHECK_THROWS_AS(evolve_master(rho0, taus, p, bath, MasterOptions{}), NumericsError);
}
