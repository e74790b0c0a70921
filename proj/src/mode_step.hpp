#pragma once

// Exact per-mode solution of the forced, drifted oscillator
//   X' = A X + (0, g),   A = [[-i a, 1], [-k^2, -i a]],
// over a step tau, plus int_0^tau psi dt.  Shared by the OpenMP kernels.

#include <cmath>
#include <complex>

namespace wp::detail {

using cplx = std::complex<double>;

struct ModeResult {
  cplx psi, pi, psi_integral;
};

// tau * e^{i z/2} sinc(z/2) = int_0^tau e^{i beta t} dt, z = beta tau
inline cplx exp_integral(double half_z, cplx half_phase, double tau) {
  const double sinc = half_z == 0.0 ? 1.0 : half_phase.imag() / half_z;
  return tau * sinc * half_phase;
}

inline ModeResult mode_step(double k2, double a, cplx psi0, cplx pi0, cplx g, double tau) {
  if (k2 == 0.0) {
    // a vanishes with kd here
    return {psi0 + pi0 * tau + 0.5 * g * tau * tau, pi0 + g * tau,
            psi0 * tau + 0.5 * pi0 * tau * tau + g * (tau * tau * tau / 6.0)};
  }
  const double k = std::sqrt(k2);
  const cplx psi_eq = g / (k2 - a * a);
  const cplx pi_eq = cplx(0.0, a) * psi_eq;
  const cplx y_psi = psi0 - psi_eq;
  const cplx y_pi = pi0 - pi_eq;

  const double hp = 0.5 * (k - a) * tau;   // z_+/2
  const double hm = 0.5 * (-k - a) * tau;  // z_-/2
  const cplx ep(std::cos(hp), std::sin(hp));
  const cplx em(std::cos(hm), std::sin(hm));
  const cplx rot = ep * std::conj(em);  // e^{i k tau}
  const cplx drift = ep * em;           // e^{-i a tau}
  const double c = rot.real(), s = rot.imag();

  ModeResult r;
  r.psi = psi_eq + drift * (c * y_psi + (s / k) * y_pi);
  r.pi = pi_eq + drift * (-k * s * y_psi + c * y_pi);

  const cplx e_plus = exp_integral(hp, ep, tau);
  const cplx e_minus = exp_integral(hm, em, tau);
  r.psi_integral = psi_eq * tau + 0.5 * (e_plus + e_minus) * y_psi +
                   (e_plus - e_minus) / cplx(0.0, 2.0 * k) * y_pi;
  return r;
}

}  // namespace wp::detail
