#include "rfdress/dressed.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfdress {

namespace {

using PC = PhysicalConstants;

void check_stencil(const Vec3& r, double h) {
  if (!(h >= kMinFdStep))
    throw std::invalid_argument(
        fmt::format("finite-difference step {} m is below the {} m floor", h, kMinFdStep));
  const double rho = std::hypot(r.x(), r.y());
  if (rho < 2.0 * h + kAxisEpsilon)
    throw std::domain_error(fmt::format(
        "finite-difference stencil at rho = {} m reaches the z-axis (h = {} m)", rho, h));
}

}  // namespace

double larmor_frequency(const Vec3& r, const TrapConfig& cfg) {
  return cfg.atom.g_F * PC::mu_B * field_magnitude(r, cfg.quad) / PC::hbar;
}

double detuning(const Vec3& r, const TrapConfig& cfg) {
  return cfg.rf.omega - larmor_frequency(r, cfg);
}

double rabi_prefactor(const TrapConfig& cfg) {
  const double k = cfg.atom.g_F * PC::mu_B / (2.0 * PC::hbar);
  return k * k;
}

double rabi_bracket(const Vec3& r, const TrapConfig& cfg) {
  const auto& rf = cfg.rf;
  const double x = r.x(), y = r.y(), z = r.z();
  const double bx2 = rf.b_x * rf.b_x, by2 = rf.b_y * rf.b_y, bz2 = rf.b_z * rf.b_z;
  const double rho2 = x * x + y * y;
  const double big_r2 = rho2 + 4.0 * z * z;
  const double big_r = std::sqrt(big_r2);

  if (rho2 <= kAxisEpsilon * kAxisEpsilon) {
    if (big_r == 0.0) return bx2 + by2;
    const double u = 2.0 * z / big_r;
    const double s2 = rho2 / big_r2;
    return 0.5 * (bx2 + by2) * (u * u + 1.0) + bz2 * s2 +
           2.0 * rf.b_x * rf.b_y * u * std::sin(rf.alpha);
  }

  const double bxby = rf.b_x * rf.b_y;
  const double bybz = rf.b_y * rf.b_z;
  const double bzbx = rf.b_z * rf.b_x;

  double t = 4.0 * z * z / big_r2 * (bx2 * x * x + by2 * y * y) / rho2;
  t += (bx2 * y * y + by2 * x * x) / rho2;
  t += bz2 * rho2 / big_r2;
  t -= 2.0 * bxby * x * y * std::cos(rf.alpha) / big_r2;
  t += 4.0 * bxby * z * std::sin(rf.alpha) / big_r;
  t += 4.0 * bybz * y * z * std::cos(rf.alpha - rf.beta) / big_r2;
  t += 2.0 * bybz * x * std::sin(rf.alpha - rf.beta) / big_r;
  t += 4.0 * bzbx * z * x * std::cos(rf.beta) / big_r2;
  t += 2.0 * bzbx * y * std::sin(rf.beta) / big_r;
  return t;
}

double rabi_squared(const Vec3& r, const TrapConfig& cfg) {
  return rabi_prefactor(cfg) * std::max(0.0, rabi_bracket(r, cfg));
}

double dressed_potential(const Vec3& r, const TrapConfig& cfg) {
  const double delta = detuning(r, cfg);
  double v = cfg.atom.m_F * PC::hbar * std::sqrt(delta * delta + rabi_squared(r, cfg));
  if (cfg.gravity_on) v += cfg.atom.mass * PC::g_accel * r.y();
  return v;
}

PotentialSample sample_potential(const Vec3& r, const TrapConfig& cfg) {
  PotentialSample s;
  s.position = r;
  s.larmor = larmor_frequency(r, cfg);
  s.detuning = cfg.rf.omega - s.larmor;
  const double rabi2 = rabi_squared(r, cfg);
  s.rabi = std::sqrt(rabi2);
  s.potential = cfg.atom.m_F * PC::hbar * std::sqrt(s.detuning * s.detuning + rabi2);
  if (cfg.gravity_on) s.potential += cfg.atom.mass * PC::g_accel * r.y();
  return s;
}

Vec3 potential_gradient(const Vec3& r, const TrapConfig& cfg, double h) {
  check_stencil(r, h);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 p = r, m = r;
    p[i] += h;
    m[i] -= h;
    g[i] = (dressed_potential(p, cfg) - dressed_potential(m, cfg)) / (2.0 * h);
  }
  return g;
}

Mat3 potential_hessian(const Vec3& r, const TrapConfig& cfg, double h) {
  check_stencil(r, h);
  const double v0 = dressed_potential(r, cfg);
  Mat3 hess;
  for (int i = 0; i < 3; ++i) {
    Vec3 p = r, m = r;
    p[i] += h;
    m[i] -= h;
    hess(i, i) = (dressed_potential(p, cfg) - 2.0 * v0 + dressed_potential(m, cfg)) / (h * h);
    for (int j = i + 1; j < 3; ++j) {
      Vec3 pp = r, pm = r, mp = r, mm = r;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      hess(i, j) = (dressed_potential(pp, cfg) - dressed_potential(pm, cfg) -
                    dressed_potential(mp, cfg) + dressed_potential(mm, cfg)) /
                   (4.0 * h * h);
      hess(j, i) = hess(i, j);
    }
  }
  return 0.5 * (hess + hess.transpose());
}

}  // namespace rfdress
