#include "spinres/signal.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "spinres/errors.hpp"

namespace spinres::signal {

namespace {

VecX make_window(Window w, Eigen::Index n) {
  VecX out(n);
  switch (w) {
    case Window::rectangular:
      out.setOnes();
      break;
    case Window::hann:
      for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));
      }
      break;
  }
  return out;
}

void check_uniform(const VecX& t) {
  if (t.size() < 2) throw ValidationError("signal: need at least two samples");
  const double dt = t[1] - t[0];
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw ValidationError("signal: non-uniform timestamps");
    }
  }
}

}  // namespace

double SpectrumEstimate::peak_frequency() const {
  Eigen::Index ipk = 0;
  power.maxCoeff(&ipk);
  if (ipk == 0 || ipk == power.size() - 1) return frequency[ipk];
  const double lm = std::log(std::max(power[ipk - 1], 1e-300));
  const double l0 = std::log(std::max(power[ipk], 1e-300));
  const double lp = std::log(std::max(power[ipk + 1], 1e-300));
  const double denom = lm - 2.0 * l0 + lp;
  double delta = 0.0;
  if (denom < 0.0) delta = 0.5 * (lm - lp) / denom;
  delta = std::clamp(delta, -0.5, 0.5);
  const double dbin = frequency[1] - frequency[0];
  return frequency[ipk] + delta * dbin;
}

SpectrumEstimate power_spectrum(const CVecX& samples, double dt, Window window,
                                int zero_pad) {
  if (samples.size() < 4) throw ValidationError("power_spectrum: too few samples");
  if (!(dt > 0.0)) throw ValidationError("power_spectrum: dt must be positive");
  if (zero_pad < 1) throw ValidationError("power_spectrum: zero_pad must be >= 1");
  const Eigen::Index n = samples.size();
  const Eigen::Index m = n * zero_pad;
  const VecX w = make_window(window, n);

  std::vector<Complex> buf(static_cast<std::size_t>(m), Complex(0.0, 0.0));
  for (Eigen::Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = w[i] * samples[i];

  Eigen::FFT<double> fft;
  std::vector<Complex> spec;
  fft.fwd(spec, buf);

  SpectrumEstimate out;
  out.window = window;
  out.n_samples = n;
  out.n_padded = m;
  out.frequency.resize(m);
  out.power.resize(m);
  // Store fftshift-free: bins k in [0, m); frequency wraps to negative for k > m/2.
  // Normalization: sum(power) == mean square of the windowed signal.
  for (Eigen::Index k = 0; k < m; ++k) {
    const double f = (k <= m / 2) ? k / (dt * m) : (k - m) / (double)(dt * m);
    out.frequency[k] = f;
    out.power[k] = std::norm(spec[static_cast<std::size_t>(k)]) / (double(m) * double(n));
  }
  return out;
}

SpectrumEstimate power_spectrum(const VecX& samples, double dt, Window window,
                                int zero_pad) {
  CVecX c = samples.cast<Complex>();
  return power_spectrum(c, dt, window, zero_pad);
}

SpectrumEstimate power_spectrum(const VecX& samples, const VecX& times, Window window,
                                int zero_pad) {
  if (samples.size() != times.size()) {
    throw ValidationError("power_spectrum: size mismatch");
  }
  check_uniform(times);
  return power_spectrum(samples, times[1] - times[0], window, zero_pad);
}

Demodulation demodulate(const VecX& x, const VecX& t, double omega_ref,
                        double min_periods, double period_tol) {
  if (x.size() != t.size()) throw ValidationError("demodulate: size mismatch");
  if (x.size() < 8) throw ValidationError("demodulate: window too short");
  if (!(omega_ref > 0.0)) throw ValidationError("demodulate: omega_ref must be positive");
  const double T = t[t.size() - 1] - t[0];
  const double periods = T * omega_ref / (2.0 * M_PI);
  if (periods < min_periods - 1e-9) {
    throw ValidationError("demodulate: window shorter than the minimum reference periods");
  }
  if (std::abs(periods - std::round(periods)) > period_tol * periods) {
    throw ValidationError("demodulate: window must span an integer number of periods");
  }
  // trapezoid quadrature
  double I = 0.0, Q = 0.0;
  for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    const double c0 = x[i] * std::cos(omega_ref * t[i]);
    const double c1 = x[i + 1] * std::cos(omega_ref * t[i + 1]);
    const double s0 = x[i] * std::sin(omega_ref * t[i]);
    const double s1 = x[i + 1] * std::sin(omega_ref * t[i + 1]);
    I += 0.5 * h * (c0 + c1);
    Q += 0.5 * h * (s0 + s1);
  }
  I *= 2.0 / T;
  Q *= 2.0 / T;
  return {I, Q, std::atan2(-Q, I), std::hypot(I, Q)};
}

FrequencyEstimate instantaneous_frequency(const VecX& phi, const VecX& q,
                                          const VecX& t, double amplitude_floor) {
  if (phi.size() != q.size() || phi.size() != t.size()) {
    throw ValidationError("instantaneous_frequency: size mismatch");
  }
  if (phi.size() < 8) throw ValidationError("instantaneous_frequency: too few samples");
  VecX ang(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (std::abs(phi[i]) + std::abs(q[i]) < amplitude_floor) {
      throw NumericsError("instantaneous_frequency: amplitude collapsed below floor");
    }
    ang[i] = std::atan2(q[i], phi[i]);
  }
  unwrap(ang);
  // least-squares line ang = a + s t
  const double n = static_cast<double>(t.size());
  const double tm = t.mean();
  const double am = ang.mean();
  double sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    sxx += (t[i] - tm) * (t[i] - tm);
    sxy += (t[i] - tm) * (ang[i] - am);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double r = ang[i] - am - slope * (t[i] - tm);
    ssr += r * r;
  }
  const double se = std::sqrt(ssr / std::max(n - 2.0, 1.0) / sxx);
  // For a conjugate pair with phi' = omega q, q' = -omega phi the angle
  // atan2(q, phi) rotates at -omega.
  return {-slope, se};
}

std::vector<Peak> find_peaks(const VecX& values, const VecX& grid, double prominence) {
  if (!(prominence > 0.0)) throw ValidationError("find_peaks: prominence must be positive");
  if (values.size() != grid.size()) throw ValidationError("find_peaks: size mismatch");
  std::vector<Peak> out;
  const Eigen::Index n = values.size();
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (!(values[i] > values[i - 1] && values[i] >= values[i + 1])) continue;
    // topographic prominence: walk out until a higher value or the boundary
    double lmin = values[i];
    for (Eigen::Index j = i; j >= 0; --j) {
      if (values[j] > values[i]) break;
      lmin = std::min(lmin, values[j]);
      if (j == 0) break;
    }
    double rmin = values[i];
    for (Eigen::Index j = i; j < n; ++j) {
      if (values[j] > values[i]) break;
      rmin = std::min(rmin, values[j]);
    }
    const double prom = values[i] - std::max(lmin, rmin);
    if (prom < prominence) continue;
    // quadratic sub-grid refinement
    const double ym = values[i - 1], y0 = values[i], yp = values[i + 1];
    const double denom = ym - 2.0 * y0 + yp;
    double delta = 0.0;
    if (denom < 0.0) delta = 0.5 * (ym - yp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    const double h = grid[i + 1] - grid[i];
    out.push_back({i, grid[i] + delta * h, y0, prom});
  }
  return out;
}

void unwrap(VecX& phase) {
  double offset = 0.0;
  for (Eigen::Index i = 1; i < phase.size(); ++i) {
    const double raw = phase[i] + offset;
    double d = raw - phase[i - 1];
    while (d > M_PI) {
      offset -= 2.0 * M_PI;
      d -= 2.0 * M_PI;
    }
    while (d <= -M_PI) {
      offset += 2.0 * M_PI;
      d += 2.0 * M_PI;
    }
    phase[i] += offset;
  }
}

double ToneFit::amplitude() const { return std::hypot(cos_amp, sin_amp); }

namespace {

ToneFit tone_ls(const VecX& x, const VecX& t, double omega) {
  double cc = 0, cs = 0, ss = 0, xc = 0, xs = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double c = std::cos(omega * t[i]);
    const double s = std::sin(omega * t[i]);
    cc += c * c;
    cs += c * s;
    ss += s * s;
    xc += x[i] * c;
    xs += x[i] * s;
  }
  const double det = cc * ss - cs * cs;
  const double a = (xc * ss - xs * cs) / det;
  const double b = (xs * cc - xc * cs) / det;
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double r = x[i] - a * std::cos(omega * t[i]) - b * std::sin(omega * t[i]);
    r2 += r * r;
  }
  return {omega, a, b, std::sqrt(r2 / t.size())};
}

}  // namespace

ToneFit fit_single_tone(const VecX& x, const VecX& t, double omega_lo, double omega_hi) {
  if (!(omega_hi > omega_lo) || !(omega_lo > 0.0)) {
    throw ValidationError("fit_single_tone: need 0 < omega_lo < omega_hi");
  }
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = omega_lo, b = omega_hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = tone_ls(x, t, x1).residual, f2 = tone_ls(x, t, x2).residual;
  for (int it = 0; it < 200 && (b - a) > 1e-12 * omega_hi; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = tone_ls(x, t, x1).residual;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = tone_ls(x, t, x2).residual;
    }
  }
  return tone_ls(x, t, 0.5 * (a + b));
}

}  // namespace spinres::signal
