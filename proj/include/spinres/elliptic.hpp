#pragma once

#include <cmath>
#include <limits>

#include "spinres/errors.hpp"

namespace spinres {

struct EllipticKE {
  double K;
  double E;
};

// Complete elliptic integrals of the first and second kind, modulus
// convention: K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t).
// Arithmetic-geometric mean iteration; converges quadratically for k in [0,1).
inline EllipticKE elliptic_KE(double k) {
  if (!(k >= 0.0) || k >= 1.0) {
    throw ValidationError("elliptic_KE: modulus must satisfy 0 <= k < 1");
  }
  const double kp2 = (1.0 - k) * (1.0 + k);  // k'^2, stable near k = 1
  double a = 1.0;
  double b = std::sqrt(kp2);
  double c = k;
  double csum = 0.5 * c * c;  // sum of 2^{n-1} c_n^2, n = 0 term
  double pow2 = 0.5;
  for (int n = 0; n < 64; ++n) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    c = 0.5 * (a - b);
    a = an;
    b = bn;
    pow2 *= 2.0;
    csum += pow2 * c * c;
    if (c < std::numeric_limits<double>::epsilon() * a) break;
  }
  const double K = M_PI / (2.0 * a);
  const double E = K * (1.0 - csum);
  return {K, E};
}

}  // namespace spinres
