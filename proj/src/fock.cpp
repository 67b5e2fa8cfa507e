#include "spinres/fock.hpp"

namespace spinres::fock {

MatX creation(int n_max) {
  if (n_max < 0) throw ValidationError("fock: n_max must be >= 0");
  const int n = n_max + 1;
  MatX ad = MatX::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) ad(k + 1, k) = std::sqrt(double(k + 1));
  return ad;
}

MatX flux_operator(int n_max) {
  const MatX ad = creation(n_max);
  return (ad + ad.transpose()) / std::sqrt(2.0);
}

CMatX charge_operator(int n_max) {
  const MatX ad = creation(n_max);
  return Complex(0.0, 1.0) * (ad - ad.transpose()).cast<Complex>() / std::sqrt(2.0);
}

CVecX coherent_amplitudes(Complex alpha, int n_max) {
  if (n_max < 0) throw ValidationError("fock: n_max must be >= 0");
  CVecX c(n_max + 1);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= n_max; ++n) c[n] = c[n - 1] * alpha / std::sqrt(double(n));
  return c;
}

MatX hermite_functions(const VecX& grid, int n_max) {
  if (n_max < 0) throw ValidationError("fock: n_max must be >= 0");
  const Eigen::Index m = grid.size();
  MatX u(m, n_max + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = grid[i];
    u(i, 0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (n_max >= 1) u(i, 1) = std::sqrt(2.0) * x * u(i, 0);
    for (int k = 2; k <= n_max; ++k) {
      u(i, k) = std::sqrt(2.0 / k) * x * u(i, k - 1) - std::sqrt((k - 1.0) / k) * u(i, k - 2);
      if (!std::isfinite(u(i, k))) {
        throw NumericsError("hermite_functions: recurrence overflow; shrink grid or n_max");
      }
    }
  }
  return u;
}

int default_n_max(double nbar) {
  if (nbar < 0.0) throw ValidationError("fock: nbar must be >= 0");
  return static_cast<int>(std::ceil(nbar + 10.0 * std::sqrt(nbar) + 20.0));
}

double tail_mass(const CVecX& amps, double fraction) {
  const Eigen::Index n = amps.size();
  const Eigen::Index start = n - std::max<Eigen::Index>(1, Eigen::Index(fraction * n));
  double tail = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = std::norm(amps[i]);
    total += p;
    if (i >= start) tail += p;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace spinres::fock
