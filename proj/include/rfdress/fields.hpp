#pragma once

#include <Eigen/Core>

#include <string>

namespace rfdress {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// CODATA 2018.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;   // J s
  static constexpr double mu_B = 9.2740100783e-24;  // J/T
  static constexpr double k_B = 1.380649e-23;       // J/K
  static constexpr double g_accel = 9.80665;        // m/s^2
};

struct AtomSpecies {
  double mass = 0.0;  // kg
  double g_F = 0.0;
  int m_F = 0;
  std::string label;

  /// 87Rb in |F=2, m_F=2>.
  static AtomSpecies rubidium87();

  /// Throws std::invalid_argument unless mass > 0, g_F > 0 and m_F >= 1.
  void validate() const;
};

/// Static quadrupole B = gradient * (x, y, -2z). The symmetry axis is z.
struct QuadrupoleConfig {
  double gradient = 0.0;  // T/m, radial

  void validate() const;
};

/// B_rf(t) = (b_x cos wt, b_y cos(wt - alpha), b_z cos(wt - beta)).
struct RfConfig {
  double b_x = 0.0;  // T
  double b_y = 0.0;
  double b_z = 0.0;
  double alpha = 0.0;  // rad
  double beta = 0.0;
  double omega = 0.0;  // rad/s

  double max_amplitude() const;
  /// Reduces alpha and beta into (-pi, pi] and checks signs.
  void normalize();
  void validate() const;
};

/// Gravity, when enabled, adds +m g y (pull towards -y).
struct TrapConfig {
  AtomSpecies atom;
  QuadrupoleConfig quad;
  RfConfig rf;
  bool gravity_on = false;

  void validate() const;
};

/// Reduces an angle into (-pi, pi].
double wrap_angle(double radians);

Vec3 quadrupole_field(const Vec3& r, const QuadrupoleConfig& quad);

/// |B| = gradient * sqrt(x^2 + y^2 + 4 z^2).
double field_magnitude(const Vec3& r, const QuadrupoleConfig& quad);

}  // namespace rfdress
