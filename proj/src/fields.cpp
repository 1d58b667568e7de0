#include "rfdress/fields.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfdress {

AtomSpecies AtomSpecies::rubidium87() {
  return AtomSpecies{1.44316e-25, 0.5, 2, "87Rb |F=2,mF=2>"};
}

void AtomSpecies::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::invalid_argument(fmt::format("atom mass must be positive, got {}", mass));
  if (!(g_F > 0.0) || !std::isfinite(g_F))
    throw std::invalid_argument(fmt::format("g_F must be positive, got {}", g_F));
  if (m_F < 1)
    throw std::invalid_argument(
        fmt::format("m_F must be >= 1 for a low-field-seeking state, got {}", m_F));
}

void QuadrupoleConfig::validate() const {
  if (!(gradient > 0.0) || !std::isfinite(gradient))
    throw std::invalid_argument(
        fmt::format("quadrupole gradient must be positive, got {} T/m", gradient));
}

double RfConfig::max_amplitude() const { return std::max({b_x, b_y, b_z}); }

void RfConfig::normalize() {
  alpha = wrap_angle(alpha);
  beta = wrap_angle(beta);
}

void RfConfig::validate() const {
  for (double b : {b_x, b_y, b_z}) {
    if (!(b >= 0.0) || !std::isfinite(b))
      throw std::invalid_argument(fmt::format("rf amplitudes must be >= 0, got {} T", b));
  }
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw std::invalid_argument(fmt::format("rf angular frequency must be positive, got {}", omega));
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    throw std::invalid_argument("rf phases must be finite");
}

void TrapConfig::validate() const {
  atom.validate();
  quad.validate();
  rf.validate();
}

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(radians, two_pi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

Vec3 quadrupole_field(const Vec3& r, const QuadrupoleConfig& quad) {
  return quad.gradient * Vec3(r.x(), r.y(), -2.0 * r.z());
}

double field_magnitude(const Vec3& r, const QuadrupoleConfig& quad) {
  return quad.gradient * std::sqrt(r.x() * r.x() + r.y() * r.y() + 4.0 * r.z() * r.z());
}

}  // namespace rfdress
