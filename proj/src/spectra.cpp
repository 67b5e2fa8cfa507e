#include "spinres/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "spinres/errors.hpp"
#include "spinres/fock.hpp"

namespace spinres::spectra {

namespace {

void check_nondegenerate(double omega_q, double omega_r) {
  if (!(omega_q > 0.0) || !(omega_r > 0.0)) {
    throw ValidationError("spectra: omega_q and omega_r must be positive");
  }
  if (std::abs(omega_q - omega_r) < kDegeneracyFloor * omega_r) {
    throw DegeneracyError("spectra: |omega_q - omega_r| below degeneracy floor");
  }
}

}  // namespace

const SpectrumRow& SpectrumTable::at(QubitBranch s, int n) const {
  for (const auto& r : rows) {
    if (r.level.qubit_state == s && r.level.photon_number == n) return r;
  }
  throw ValidationError("SpectrumTable: level not present");
}

void SpectrumTable::write_csv(std::ostream& os) const {
  os << "state,n,E0,E2,E4,E_total,E_exact\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << branch_name(r.level.qubit_state) << ',' << r.level.photon_number << ','
       << r.e0 << ',' << r.e2 << ',' << r.e4 << ',' << r.e_total() << ',' << r.e_exact
       << '\n';
  }
}

double unperturbed_level(LevelIndex idx, double omega_q, double omega_r) {
  if (!(omega_q > 0.0) || !(omega_r > 0.0)) {
    throw ValidationError("unperturbed_level: frequencies must be positive");
  }
  const double s = idx.qubit_state == QubitBranch::ground ? -1.0 : 1.0;
  return s * omega_q / 2.0 + omega_r * (idx.photon_number + 0.5);
}

double second_order_shift(LevelIndex idx, double lambda, double omega_q, double omega_r) {
  check_nondegenerate(omega_q, omega_r);
  const double n = idx.photon_number;
  const double l2 = lambda * lambda;
  if (idx.qubit_state == QubitBranch::ground) {
    return -l2 * ((n + 1.0) / (omega_q + omega_r) + n / (omega_q - omega_r));
  }
  return l2 * ((n + 1.0) / (omega_q - omega_r) + n / (omega_q + omega_r));
}

double dispersive_shift(double lambda, double omega_q, double omega_r) {
  check_nondegenerate(omega_q, omega_r);
  return -2.0 * lambda * lambda * omega_q / (omega_q * omega_q - omega_r * omega_r);
}

double lamb_shift(double lambda, double omega_q, double omega_r) {
  check_nondegenerate(omega_q, omega_r);
  return 2.0 * lambda * lambda * omega_q / (omega_q * omega_q - omega_r * omega_r);
}

double fourth_order_shift(LevelIndex idx, double lambda, double omega_q, double omega_r,
                          FourthOrderVariant variant) {
  check_nondegenerate(omega_q, omega_r);
  const double n = idx.photon_number;
  const double l4 = lambda * lambda * lambda * lambda;
  const double wm = omega_q - omega_r;
  const double wp = omega_q + omega_r;
  const double d2 = omega_q * omega_q - omega_r * omega_r;
  const bool up = idx.qubit_state == QubitBranch::ground;
  switch (variant) {
    case FourthOrderVariant::full: {
      if (up) {
        const double t1 = l4 * (wm * (n + 1) + wp * n) *
                          (wm * wm * (n + 1) + wp * wp * n) / (d2 * d2 * d2);
        const double t2 = l4 *
                          (-wm * wm * (n + 1) * (n + 2) + wp * wp * n * (n - 1)) /
                          (2.0 * omega_r * d2 * d2);
        return t1 + t2;
      }
      const double t1 = -l4 * (wp * (n + 1) + wm * n) *
                        (wp * wp * (n + 1) + wm * wm * n) / (d2 * d2 * d2);
      const double t2 = l4 *
                        (-wp * wp * (n + 1) * (n + 2) + wm * wm * n * (n - 1)) /
                        (2.0 * omega_r * d2 * d2);
      return t1 + t2;
    }
    case FourthOrderVariant::near_resonant: {
      const double pref = l4 * wp * wp * wp / (d2 * d2 * d2);
      return up ? pref * n * n : -pref * (n + 1) * (n + 1);
    }
    case FourthOrderVariant::far_detuned: {
      const double pref = 6.0 * l4 / (omega_q * omega_q * omega_q);
      return up ? pref * n * n : -pref * n * n;
    }
  }
  throw ValidationError("fourth_order_shift: unknown variant");
}

SpectrumTable perturbative_table(double lambda, double omega_q, double omega_r, int n_top) {
  SpectrumTable table;
  for (QubitBranch s : {QubitBranch::ground, QubitBranch::excited}) {
    for (int n = 0; n <= n_top; ++n) {
      LevelIndex idx{n, s};
      SpectrumRow row;
      row.level = idx;
      row.e0 = unperturbed_level(idx, omega_q, omega_r);
      row.e2 = second_order_shift(idx, lambda, omega_q, omega_r);
      row.e4 = fourth_order_shift(idx, lambda, omega_q, omega_r);
      table.rows.push_back(row);
    }
  }
  return table;
}

resonator::NonlinearOscParams effective_nonlinear_params(double lambda, double omega_q,
                                                         double omega_r,
                                                         QubitBranch state, int n_fit) {
  if (n_fit < 2) throw ValidationError("effective_nonlinear_params: n_fit must be >= 2");
  const int m = n_fit + 1;
  MatX A(m, 3);
  VecX y(m);
  for (int n = 0; n < m; ++n) {
    A(n, 0) = 1.0;
    A(n, 1) = n;
    A(n, 2) = double(n) * n;
    LevelIndex idx{n, state};
    y[n] = unperturbed_level(idx, omega_q, omega_r) +
           second_order_shift(idx, lambda, omega_q, omega_r) +
           fourth_order_shift(idx, lambda, omega_q, omega_r);
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(y);
  const double resid = (A * coef - y).norm();
  const double bound =
      std::max(1e-3 * std::abs(coef[2]) * double(n_fit) * n_fit, 1e-10 * omega_r);
  if (resid > bound) {
    throw NumericsError("effective_nonlinear_params: quadratic fit residual too large");
  }
  resonator::NonlinearOscParams out;
  out.base_frequency = coef[1];
  out.nonlinearity = coef[2];
  out.constant_offset = coef[0];
  out.branch = state;
  return out;
}

SpectrumTable exact_diagonalize(double omega_q, double omega_r, double lambda, int n_max,
                                const ExactDiagonalizeOptions& opt) {
  if (n_max < 1) throw ValidationError("exact_diagonalize: n_max too small");
  if (opt.ramp_steps < 8) throw ValidationError("exact_diagonalize: need >= 8 ramp steps");
  const int nf = n_max + 1;
  const int dim = 2 * nf;

  const MatX ad = fock::creation(n_max);
  const MatX ladder = ad - ad.transpose();  // a^dagger - a (antisymmetric)
  // i sigma_y = [[0, 1], [-1, 0]] is real, so H is real symmetric:
  // H = -(omega_q/2) sigma_z x I + omega_r I x (n + 1/2) + lambda [[0,1],[-1,0]] x (ad - a)
  auto build = [&](double lm) {
    MatX h = MatX::Zero(dim, dim);
    for (int n = 0; n < nf; ++n) {
      h(n, n) = -0.5 * omega_q + omega_r * (n + 0.5);
      h(nf + n, nf + n) = 0.5 * omega_q + omega_r * (n + 0.5);
    }
    h.block(0, nf, nf, nf) = lm * ladder;
    h.block(nf, 0, nf, nf) = -lm * ladder;
    // symmetry: (lm * ladder)^T = -lm * ladder equals the lower block.
    return h;
  };

  std::vector<int> label(dim);  // eigenvalue slot -> basis index at lambda = 0
  MatX prev_vecs;
  VecX vals;
  for (int step = 0; step <= opt.ramp_steps; ++step) {
    const double lm = lambda * step / opt.ramp_steps;
    Eigen::SelfAdjointEigenSolver<MatX> es(build(lm));
    if (es.info() != Eigen::Success) {
      throw NumericsError("exact_diagonalize: eigensolver failed");
    }
    const MatX& vecs = es.eigenvectors();
    vals = es.eigenvalues();
    if (step == 0) {
      for (int k = 0; k < dim; ++k) {
        Eigen::Index imax = 0;
        vecs.col(k).cwiseAbs().maxCoeff(&imax);
        label[k] = static_cast<int>(imax);
      }
    } else {
      const MatX overlap = (prev_vecs.transpose() * vecs).cwiseAbs();
      std::vector<int> next(dim, -1);
      std::vector<char> used(dim, 0);
      for (int k = 0; k < dim; ++k) {
        Eigen::Index jmax = 0;
        double best = -1.0;
        for (int j = 0; j < dim; ++j) {
          if (!used[j] && overlap(k, j) > best) {
            best = overlap(k, j);
            jmax = j;
          }
        }
        if (best < opt.min_overlap) {
          throw NumericsError(
              "exact_diagonalize: label tracking ambiguous (overlap < threshold); "
              "increase ramp steps or n_max");
        }
        used[jmax] = 1;
        next[jmax] = label[k];
      }
      label = next;
    }
    prev_vecs = vecs;
  }

  SpectrumTable table;
  for (int k = 0; k < dim; ++k) {
    SpectrumRow row;
    const int idx = label[k];
    row.level.qubit_state = idx < nf ? QubitBranch::ground : QubitBranch::excited;
    row.level.photon_number = idx % nf;
    row.e_exact = vals[k];
    table.rows.push_back(row);
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    if (a.level.qubit_state != b.level.qubit_state) {
      return a.level.qubit_state == QubitBranch::ground;
    }
    return a.level.photon_number < b.level.photon_number;
  });
  return table;
}

void attach_exact(SpectrumTable& table, double lambda, double omega_q, double omega_r) {
  int n_top = 0;
  for (const auto& r : table.rows) n_top = std::max(n_top, r.level.photon_number);
  const int margin = static_cast<int>(std::ceil(4.0 * lambda / std::abs(omega_q - omega_r)));
  const int n_max = 4 + n_top + margin + 12;
  const SpectrumTable exact = exact_diagonalize(omega_q, omega_r, lambda, n_max);
  for (auto& r : table.rows) {
    r.e_exact = exact.at(r.level.qubit_state, r.level.photon_number).e_exact;
  }
}

}  // namespace spinres::spectra
