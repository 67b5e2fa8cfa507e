#include "spinres/resonator.hpp"

namespace spinres::resonator {

CVecX flux_wavefunction(Complex alpha, const VecX& grid, double norm_tol) {
  if (grid.size() < 8) throw ValidationError("flux_wavefunction: grid too small");
  const double root2 = std::sqrt(2.0);
  const double center = root2 * alpha.real();
  const double lo = grid[0], hi = grid[grid.size() - 1];
  if (lo > center - 6.0 * root2 || hi < center + 6.0 * root2) {
    throw ValidationError("flux_wavefunction: grid must cover |phi/sqrt2 - Re alpha| <= 6");
  }
  CVecX u(grid.size());
  const Complex pref = std::pow(M_PI, -0.25) *
                       std::exp((alpha * alpha - Complex(std::norm(alpha), 0.0)) / 2.0);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Complex d = Complex(grid[i] / root2, 0.0) - alpha;
    u[i] = pref * std::exp(-d * d);
  }
  // trapezoid norm check
  double nrm = 0.0;
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    nrm += 0.5 * (grid[i + 1] - grid[i]) * (std::norm(u[i]) + std::norm(u[i + 1]));
  }
  if (std::abs(nrm - 1.0) > norm_tol) {
    throw NumericsError("flux_wavefunction: normalization failure, grid too narrow or coarse");
  }
  return u;
}

}  // namespace spinres::resonator
