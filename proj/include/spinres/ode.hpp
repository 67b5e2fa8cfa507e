#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "spinres/errors.hpp"
#include "spinres/types.hpp"

namespace spinres {

struct IntegratorStats {
  std::uint64_t steps = 0;
  std::uint64_t rejected = 0;
  std::uint64_t rhs_evals = 0;
  double max_error_estimate = 0.0;
};

struct Trajectory {
  VecX times;   // strictly increasing sample times
  MatX states;  // one column per sample
  IntegratorStats stats;

  Eigen::Index size() const { return times.size(); }
  VecX state(Eigen::Index i) const { return states.col(i); }
};

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 -> automatic
  std::uint64_t max_steps = 500'000'000;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// b - bhat (error) coefficients.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output quartic coefficients (Hairer, Norsett, Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace detail

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) with 4th-order dense
// output evaluated at caller-specified sample times. `rhs` is called as
// rhs(t, y, dydt). Throws NumericsError on step underflow or NaN.
template <typename RHS>
Trajectory ode_solve(RHS&& rhs, const VecX& y0, std::pair<double, double> t_span,
                     const VecX& sample_times, const OdeOptions& opt = {}) {
  using namespace detail;
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0)) {
    throw ValidationError("ode_solve: tolerances must be positive");
  }
  const double t0 = t_span.first, t1 = t_span.second;
  if (!(t1 > t0)) throw ValidationError("ode_solve: need t1 > t0");
  for (Eigen::Index i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 - 1e-12 || sample_times[i] > t1 + 1e-12 ||
        (i > 0 && !(sample_times[i] > sample_times[i - 1]))) {
      throw ValidationError("ode_solve: sample times must be increasing and inside t_span");
    }
  }

  const Eigen::Index n = y0.size();
  Trajectory out;
  out.times = sample_times;
  out.states.resize(n, sample_times.size());

  VecX y = y0, ynew(n), yerr(n), ysc(n);
  VecX k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), work(n);
  VecX r1(n), r2(n), r3(n), r4(n), r5(n);

  double t = t0;
  rhs(t, y, k1);
  IntegratorStats& st = out.stats;
  st.rhs_evals++;

  double h = opt.initial_step;
  if (h <= 0.0) {
    // crude starting step from the scale of y and y'
    const double d0 = y.cwiseAbs().maxCoeff() + opt.abs_tol;
    const double d1n = k1.cwiseAbs().maxCoeff() + opt.abs_tol;
    h = 0.01 * d0 / d1n;
    h = std::min({h, (t1 - t0) / 10.0, opt.max_step});
    h = std::max(h, 1e-10 * (t1 - t0));
  }
  h = std::min(h, opt.max_step);

  Eigen::Index isample = 0;
  // emit samples exactly at t0 if requested
  while (isample < sample_times.size() && sample_times[isample] <= t + 1e-14 * std::abs(t)) {
    out.states.col(isample++) = y;
  }

  bool last = false;
  while (!last) {
    if (st.steps + st.rejected > opt.max_steps) {
      throw NumericsError("ode_solve: exceeded max step count");
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
      throw NumericsError("ode_solve: step size underflow at t = " + std::to_string(t));
    }
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }

    work = y + h * (a21 * k1);
    rhs(t + c2 * h, work, k2);
    work = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, work, k3);
    work = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, work, k4);
    work = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, work, k5);
    work = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, work, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    st.rhs_evals += 6;

    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    ysc = opt.abs_tol + opt.rel_tol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array();
    const double err = std::sqrt((yerr.array() / ysc.array()).square().mean());
    if (!std::isfinite(err)) {
      throw NumericsError("ode_solve: non-finite state at t = " + std::to_string(t));
    }

    if (err <= 1.0) {
      st.steps++;
      st.max_error_estimate = std::max(st.max_error_estimate, err);
      // dense output over [t, t+h]
      if (isample < sample_times.size() && sample_times[isample] <= t + h + 1e-14) {
        r1 = y;
        r2 = ynew - y;
        r3 = h * k1 - r2;
        r4 = r2 - h * k7 - r3;
        r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (isample < sample_times.size() && sample_times[isample] <= t + h + 1e-14) {
          const double th = (sample_times[isample] - t) / h;
          const double th1 = 1.0 - th;
          out.states.col(isample) =
              r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
          isample++;
        }
      }
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      const double fac = std::clamp(0.8 * std::pow(err + 1e-30, -0.2), 0.2, 5.0);
      h = std::min(h * fac, opt.max_step);
    } else {
      st.rejected++;
      last = false;
      const double fac = std::clamp(0.8 * std::pow(err, -0.2), 0.1, 1.0);
      h *= fac;
    }
  }
  // flush any samples that coincide with t1
  while (isample < sample_times.size()) {
    out.states.col(isample++) = y;
  }
  return out;
}

}  // namespace spinres
