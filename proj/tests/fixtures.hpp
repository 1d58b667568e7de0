#pragma once

#include "rfdress/fields.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace fixtures {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kGauss = 1e-4;

inline rfdress::TrapConfig base(double bx_G, double by_G, double bz_G, double alpha, double beta,
                                double freq_MHz = 1.5, double grad_G_per_cm = 100.0) {
  rfdress::TrapConfig c;
  c.atom = rfdress::AtomSpecies::rubidium87();
  c.quad.gradient = grad_G_per_cm * 1e-2;
  c.rf.b_x = bx_G * kGauss;
  c.rf.b_y = by_G * kGauss;
  c.rf.b_z = bz_G * kGauss;
  c.rf.alpha = alpha;
  c.rf.beta = beta;
  c.rf.omega = 2.0 * kPi * freq_MHz * 1e6;
  return c;
}

inline rfdress::TrapConfig double_well() { return base(0.7, 0.0, 0.0, 0.0, 0.0); }
inline rfdress::TrapConfig circular() { return base(0.7, 0.7, 0.0, -kPi / 2, 0.0); }
inline rfdress::TrapConfig tilted() { return base(0.7, 0.0, 0.2, 0.0, 0.0); }

// Resonance radius from the constants written out by hand.
inline double r0_oracle(double freq_MHz = 1.5, double grad_T_per_m = 1.0) {
  return 1.054571817e-34 * 2.0 * kPi * freq_MHz * 1e6 / (0.5 * 9.2740100783e-24 * grad_T_per_m);
}

// Coupling bracket from the rf amplitude vector A = (bx, by e^-ia, bz e^-ib):
// the part of A transverse to the local field plus its helicity along n.
inline double bracket_oracle(double x, double y, double z, const rfdress::RfConfig& rf) {
  using C = std::complex<double>;
  const C a[3] = {C(rf.b_x, 0.0), rf.b_y * std::exp(C(0.0, -rf.alpha)), rf.b_z * std::exp(C(0.0, -rf.beta))};
  const double norm = std::sqrt(x * x + y * y + 4.0 * z * z);
  const double n[3] = {x / norm, y / norm, -2.0 * z / norm};
  double a2 = 0.0;
  C na = 0.0;
  for (int i = 0; i < 3; ++i) {
    a2 += std::norm(a[i]);
    na += n[i] * a[i];
  }
  double hel = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    hel += n[i] * std::imag(std::conj(a[j]) * a[k] - std::conj(a[k]) * a[j]);
  }
  return a2 - std::norm(na) + hel;
}

}  // namespace fixtures
