#pragma once

#include "rfdress/fields.hpp"

namespace rfdress {

/// Points closer than this to the z-axis use the azimuthally averaged
/// coupling (see rabi_bracket).
inline constexpr double kAxisEpsilon = 1e-12;  // m

/// Default central-difference step.
inline constexpr double kDefaultFdStep = 1e-7;  // m
inline constexpr double kMinFdStep = 1e-9;      // m

struct PotentialSample {
  Vec3 position = Vec3::Zero();
  double larmor = 0.0;    // rad/s
  double detuning = 0.0;  // rad/s
  double rabi = 0.0;      // rad/s, >= 0
  double potential = 0.0; // J
};

/// omega_0 = g_F mu_B |B| / hbar.
double larmor_frequency(const Vec3& r, const TrapConfig& cfg);

/// delta = omega - omega_0; positive inside the resonance shell.
double detuning(const Vec3& r, const TrapConfig& cfg);

/// (g_F mu_B / 2 hbar)^2, the prefactor of the coupling bracket.
double rabi_prefactor(const TrapConfig& cfg);

/// The bracket of the rotating-wave coupling, in T^2, before clamping.
///
/// The terms with x^2 + y^2 denominators have direction-dependent limits on
/// the z-axis. Within kAxisEpsilon of the axis the bracket is replaced by its
/// azimuthal average at the same (rho, z); at the origin the two one-sided
/// limits along z are averaged, which gives b_x^2 + b_y^2.
double rabi_bracket(const Vec3& r, const TrapConfig& cfg);

/// |Omega|^2 in (rad/s)^2, clamped at zero.
double rabi_squared(const Vec3& r, const TrapConfig& cfg);

/// V = m_F hbar sqrt(delta^2 + |Omega|^2) (+ m g y with gravity).
double dressed_potential(const Vec3& r, const TrapConfig& cfg);

PotentialSample sample_potential(const Vec3& r, const TrapConfig& cfg);

/// Central differences, O(h^2). Throws std::invalid_argument when h is below
/// kMinFdStep, std::domain_error when the stencil reaches the axis tube.
Vec3 potential_gradient(const Vec3& r, const TrapConfig& cfg, double h = kDefaultFdStep);

/// Central-difference Hessian, symmetrized.
Mat3 potential_hessian(const Vec3& r, const TrapConfig& cfg, double h = kDefaultFdStep);

}  // namespace rfdress
