#include <doctest.h>

#include <cmath>
#include <random>

#include "spinres/errors.hpp"
#include "spinres/qubit.hpp"

using namespace spinres;
using namespace spinres::qubit;

TEST_CASE("washboard potential values and stationary points") {
  CHECK(washboard_potential(0.0, 0.0, 1.0) == doctest::Approx(-1.0));
  CHECK(washboard_potential(M_PI, 0.0, 1.0) == doctest::Approx(1.0));
  // dense scan: at bias 0.5 a local minimum sits at asin(0.5)
  const double bias = 0.5;
  const double dstar = std::asin(bias);
  auto u = [&](double d) { return washboard_potential(d, bias, 1.0); };
  const double h = 1e-5;
  const double d1 = (u(dstar + h) - u(dstar - h)) / (2 * h);
  const double d2 = (u(dstar + h) - 2 * u(dstar) + u(dstar - h)) / (h * h);
  CHECK(std::abs(d1) < 1e-9);
  CHECK(d2 > 0.0);
  // scan over (-pi, pi) confirms it is the only interior minimum
  int minima = 0;
  double best = 1e9, arg = 0.0;
  for (int i = 1; i < 9999; ++i) {
    const double d = -M_PI + 2 * M_PI * i / 10000.0;
    const double um = u(d - 2 * M_PI / 10000.0), u0 = u(d), up = u(d + 2 * M_PI / 10000.0);
    if (u0 < um && u0 < up) {
      minima++;
      if (u0 < best) {
        best = u0;
        arg = d;
      }
    }
  }
  CHECK(minima == 1);
  CHECK(std::abs(arg - dstar) < 1e-3);
}

TEST_CASE("josephson inductance and its singularity") {
  CHECK(josephson_inductance(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(josephson_inductance(M_PI / 3, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(josephson_inductance(M_PI / 2 - 1e-10, 1.0), SingularityError);
  CHECK(josephson_inductance(M_PI / 2 - 1e-6, 1.0) > 9e5);
}

TEST_CASE("junction params relation E_J = I_c phi0 / 2 pi") {
  JunctionParams p{2.0, 1.0, 3.0};
  p.validate();
  CHECK(p.josephson_energy() == doctest::Approx(2.0 * 3.0 / (2.0 * M_PI)).epsilon(1e-15));
}

TEST_CASE("rf squid potential: symmetry and parabola limit") {
  const double phi0 = 1.0, EJ = 1.1, L = 0.3, phie = 0.5;
  for (double x : {0.01, 0.07, 0.21}) {
    const double up = rf_squid_potential(phi0 / 2 + x, EJ, L, phie, phi0);
    const double dn = rf_squid_potential(phi0 / 2 - x, EJ, L, phie, phi0);
    CHECK(up == doctest::Approx(dn).epsilon(1e-12));
  }
  // E_J = 0: pure parabola minimized at phi_e
  const double h = 1e-6;
  const double d1 = (rf_squid_potential(phie + h, 0.0, L, phie, phi0) -
                     rf_squid_potential(phie - h, 0.0, L, phie, phi0)) /
                    (2 * h);
  CHECK(std::abs(d1) < 1e-9);
}

TEST_CASE("rf squid double well barrier vs quartic expansion at chi = 0.1") {
  // E_J/E_L = 1 + chi at half-flux bias: dense scan of the loop potential
  const double phi0 = 1.0, chi = 0.1, EL = 1.0;
  const double L = (phi0 / (2 * M_PI)) * (phi0 / (2 * M_PI)) / EL;
  const double EJ = EL * (1 + chi);
  const double phie = phi0 / 2;
  const int n = 400000;
  double umin = 1e99, ucenter = rf_squid_potential(phie, EJ, L, phie, phi0);
  int minima = 0;
  for (int i = 1; i < n; ++i) {
    const double phi = 0.3 + 0.4 * double(i) / n;
    const double um = rf_squid_potential(0.3 + 0.4 * (i - 1.0) / n, EJ, L, phie, phi0);
    const double u0 = rf_squid_potential(phi, EJ, L, phie, phi0);
    const double up = rf_squid_potential(0.3 + 0.4 * (i + 1.0) / n, EJ, L, phie, phi0);
    if (u0 < um && u0 < up) minima++;
    umin = std::min(umin, u0);
  }
  CHECK(minima == 2);
  const double barrier = ucenter - umin;
  // cross-check against the quartic form: its barrier is (3/2) E_L chi^2 / (1+chi)
  const double quartic_barrier = 1.5 * EL * chi * chi / (1 + chi);
  CHECK(std::abs(barrier - quartic_barrier) / quartic_barrier < 0.05);
  // the leading-order estimate (3/2) E_L chi^2 carries its O(chi) correction
  CHECK(std::abs(barrier - 1.5 * EL * chi * chi) / (1.5 * EL * chi * chi) < 0.1);
}

TEST_CASE("quartic potential: center value, minima, tilt") {
  DoubleWellParams p{1.0, 0.1, 0.0, 1.0};
  CHECK(quartic_potential(0.0, p) == doctest::Approx(1.1));
  // numeric minimization oracle
  double best = 1e99, arg = 0.0;
  for (int i = 0; i <= 600000; ++i) {
    const double d = -3.0 + 6.0 * i / 600000.0;
    const double u = quartic_potential(d, p);
    if (u < best) {
      best = u;
      arg = d;
    }
  }
  const double dmin = quartic_minimum_position(p);
  CHECK(std::abs(std::abs(arg) - dmin) < 1e-4);
  CHECK(dmin == doctest::Approx(std::sqrt(6.0 * 0.1 / 1.1)).epsilon(1e-12));
  // barrier: (3/2) E_L chi^2 up to O(chi)
  const double barrier = quartic_potential(0.0, p) - best;
  CHECK(std::abs(barrier - 1.5 * 0.1 * 0.1) < 1.5 * 0.1 * 0.1 * (0.1 * 1.5));
  // small tilt f: well asymmetry ~ 2 f delta_min E_L
  DoubleWellParams pt = p;
  pt.bias_asymmetry = 1e-3;
  double bl = 1e99, br = 1e99;
  for (int i = 0; i <= 600000; ++i) {
    const double d = -3.0 + 6.0 * i / 600000.0;
    const double u = quartic_potential(d, pt);
    if (d < 0) bl = std::min(bl, u);
    if (d > 0) br = std::min(br, u);
  }
  const double pred = 2.0 * 1e-3 * dmin * 1.0;
  CHECK(std::abs((bl - br) - pred) < 0.02 * pred);
}

TEST_CASE("two-level eigensystem: symmetric well and 3-4-5 case") {
  const auto sym = two_level_eigensystem(TwoLevelParams{0.0, 1.0});
  CHECK(sym.energy_ground == doctest::Approx(-0.5));
  CHECK(sym.energy_excited == doctest::Approx(0.5));
  CHECK(sym.ground[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(sym.ground[1] == doctest::Approx(1.0 / std::sqrt(2.0)));

  const auto tri = two_level_eigensystem(TwoLevelParams{3.0, 4.0});
  CHECK(tri.energy_ground == doctest::Approx(-2.5));
  CHECK(tri.energy_excited == doctest::Approx(2.5));
}

TEST_CASE("two-level eigensystem matches a generic 2x2 hermitian solve to 1e-12") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double eps = u(rng);
    const double del = std::abs(u(rng)) + 1e-3;
    const auto sys = two_level_eigensystem(TwoLevelParams{eps, del});
    Eigen::Matrix2d h;
    h << -0.5 * eps, -0.5 * del, -0.5 * del, 0.5 * eps;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    CHECK(std::abs(sys.energy_ground - es.eigenvalues()[0]) < 1e-12);
    CHECK(std::abs(sys.energy_excited - es.eigenvalues()[1]) < 1e-12);
    // eigenvectors match up to sign
    const double o1 = std::abs(sys.ground.dot(es.eigenvectors().col(0)));
    const double o2 = std::abs(sys.excited.dot(es.eigenvectors().col(1)));
    CHECK(o1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o2 == doctest::Approx(1.0).epsilon(1e-12));
    // E1 = -E2 and ground-state components share a sign
    CHECK(sys.energy_ground == doctest::Approx(-sys.energy_excited).epsilon(1e-14));
    CHECK(sys.ground[0] * sys.ground[1] >= 0.0);
    // diagonalization property: U^T H U diagonal to 1e-12
    Eigen::Matrix2d U;
    U.col(0) = sys.ground;
    U.col(1) = sys.excited;
    const Eigen::Matrix2d d = U.transpose() * h * U;
    CHECK(std::abs(d(0, 1)) < 1e-12);
    CHECK(std::abs(d(1, 0)) < 1e-12);
  }
}

TEST_CASE("degenerate two-level input rejected") {
  CHECK_THROWS_AS(two_level_eigensystem(TwoLevelParams{0.0, 0.0}), DegeneracyError);
  CHECK_THROWS_AS(mixing_angle(0.0, 0.0), DegeneracyError);
  CHECK_THROWS_AS(two_level_eigensystem(TwoLevelParams{1.0, -1.0}), ValidationError);
}

TEST_CASE("mixing angle") {
  auto m = mixing_angle(0.0, 1.0);
  CHECK(m.cos_alpha == doctest::Approx(0.0));
  CHECK(m.sin_alpha == doctest::Approx(1.0));
  m = mixing_angle(1.0, 0.0);
  CHECK(m.cos_alpha == doctest::Approx(1.0));
  CHECK(m.sin_alpha == doctest::Approx(0.0));
  m = mixing_angle(1.0, 1.0);
  CHECK(m.cos_alpha == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(m.sin_alpha == doctest::Approx(1.0 / std::sqrt(2.0)));
  // sin alpha >= 0 and normalization
  m = mixing_angle(-2.0, -3.0);
  CHECK(m.sin_alpha >= 0.0);
  CHECK(m.cos_alpha * m.cos_alpha + m.sin_alpha * m.sin_alpha ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("inductive coupling") {
  // symmetric wells: phi_rr = -phi_ll gives lambda' = 0
  auto c = inductive_coupling(0.1, 1.0, 2.0, 3.0, 0.5, 0.7, -0.7);
  CHECK(c.lambda_prime == doctest::Approx(0.0));
  // M = 0 -> lambda = 0
  c = inductive_coupling(0.0, 1.0, 2.0, 3.0, 0.5, 0.7, 0.1);
  CHECK(c.lambda == doctest::Approx(0.0));
  // doubling M doubles both couplings
  const auto c1 = inductive_coupling(0.1, 1.0, 2.0, 3.0, 0.5, 0.7, 0.1);
  const auto c2 = inductive_coupling(0.2, 1.0, 2.0, 3.0, 0.5, 0.7, 0.1);
  CHECK(c2.lambda == doctest::Approx(2.0 * c1.lambda).epsilon(1e-15));
  CHECK(c2.lambda_prime == doctest::Approx(2.0 * c1.lambda_prime).epsilon(1e-15));
  CHECK_THROWS_AS(inductive_coupling(0.1, 1.0, 2.0, 3.0, 0.5, 0.7, 0.7),
                  ValidationError);
}

TEST_CASE("effective bias: limits and completing the square") {
  // L1 -> infinity leaves (phi_e, L_J)
  auto eb = effective_bias(0.8, 1e12, 2.0);
  CHECK(eb.external_flux == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(eb.inductance == doctest::Approx(2.0).epsilon(1e-10));
  eb = effective_bias(0.8, 1.0, 1.0);
  CHECK(eb.external_flux == doctest::Approx(0.4));
  CHECK(eb.inductance == doctest::Approx(0.5));
  // (phi-phi_e)^2/2L_J + phi^2/2L1 - (phi-phi_e')^2/2L_J' constant over a grid
  const double phie = 0.37, L1 = 0.9, LJ = 1.7;
  eb = effective_bias(phie, L1, LJ);
  double ref = 0.0;
  bool first = true;
  for (double phi = -2.0; phi <= 2.0; phi += 0.01) {
    const double lhs = (phi - phie) * (phi - phie) / (2 * LJ) + phi * phi / (2 * L1);
    const double rhs = (phi - eb.external_flux) * (phi - eb.external_flux) /
                       (2 * eb.inductance);
    const double c = lhs - rhs;
    if (first) {
      ref = c;
      first = false;
    }
    CHECK(std::abs(c - ref) < 1e-12);
  }
}
