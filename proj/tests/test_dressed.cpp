#include "doctest.h"

#include "rfdress/analysis.hpp"
#include "rfdress/dressed.hpp"

#include "fixtures.hpp"

#include <random>

using namespace rfdress;
using fixtures::kPi;

namespace {

Vec3 random_torus_point(std::mt19937_64& rng, double r0) {
  std::uniform_real_distribution<double> rho(0.3 * r0, 2.0 * r0), phi(-kPi, kPi), z(-0.8 * r0, 0.8 * r0);
  const double p = phi(rng), r = rho(rng);
  return Vec3(r * std::cos(p), r * std::sin(p), z(rng));
}

TrapConfig random_rf(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.0, 1.0), ang(-kPi, kPi);
  return fixtures::base(amp(rng), amp(rng), amp(rng), ang(rng), ang(rng));
}

}  // namespace

TEST_CASE("detuning vanishes on the resonance shell") {
  const auto c = fixtures::circular();
  const double r0 = fixtures::r0_oracle();
  CHECK(std::abs(detuning(Vec3(r0, 0, 0), c)) < 1e-9 * c.rf.omega);
  CHECK(std::abs(detuning(Vec3(0, 0.6 * r0, 0.4 * r0), c)) < 1e-9 * c.rf.omega);
  CHECK(detuning(Vec3(0.5 * r0, 0, 0), c) > 0.0);
  CHECK(larmor_frequency(Vec3(2 * r0, 0, 0), c) == doctest::Approx(2 * c.rf.omega));
}

TEST_CASE("coupling matches the transverse-plus-helicity form of the rf vector") {
  std::mt19937_64 rng(11);
  const double r0 = fixtures::r0_oracle();
  for (int i = 0; i < 2000; ++i) {
    const auto c = random_rf(rng);
    const Vec3 r = random_torus_point(rng, r0);
    const double scale = c.rf.b_x * c.rf.b_x + c.rf.b_y * c.rf.b_y + c.rf.b_z * c.rf.b_z;
    REQUIRE(rabi_bracket(r, c) == doctest::Approx(fixtures::bracket_oracle(r.x(), r.y(), r.z(), c.rf))
                                      .epsilon(1e-12)
                                      .scale(scale));
  }
}

TEST_CASE("circular coupling at 0.7 G in the mid-plane") {
  const auto c = fixtures::circular();
  const double r0 = fixtures::r0_oracle();
  for (double phi : {0.0, 0.3, 2.0, -1.7})
    CHECK(std::sqrt(rabi_squared(Vec3(r0 * std::cos(phi), r0 * std::sin(phi), 0), c)) ==
          doctest::Approx(1.5391e6).epsilon(1e-4));
  // the helicity term makes the coupling grow towards -z and vanish at the +z pole
  CHECK(rabi_squared(Vec3(r0, 0, -1e-6), c) > rabi_squared(Vec3(r0, 0, 1e-6), c));
  CHECK(rabi_squared(Vec3(1e-9, 0, r0 / 2), c) < 1e-6 * rabi_squared(Vec3(r0, 0, 0), c));
}

TEST_CASE("linear coupling at z = 0 follows sin^2 phi") {
  const auto c = fixtures::double_well();
  const double r0 = fixtures::r0_oracle();
  const double peak = rabi_squared(Vec3(0, r0, 0), c);
  for (int k = 0; k < 36; ++k) {
    const double phi = k * kPi / 18;
    const double s = std::sin(phi);
    CHECK(rabi_squared(Vec3(r0 * std::cos(phi), r0 * s, 0), c) ==
          doctest::Approx(peak * s * s).scale(peak).epsilon(1e-12));
  }
}

TEST_CASE("zero rf gives the bare detuning potential") {
  auto c = fixtures::base(0, 0, 0, 0, 0);
  const double r0 = fixtures::r0_oracle();
  CHECK(dressed_potential(Vec3(r0, 0, 0), c) == doctest::Approx(0.0).scale(1e-30));
  const Vec3 p(0.3 * r0, 0.2 * r0, 0.1 * r0);
  CHECK(dressed_potential(p, c) == doctest::Approx(2 * 1.054571817e-34 * std::abs(detuning(p, c))));
}

TEST_CASE("gravity adds m g y") {
  auto c = fixtures::double_well();
  const Vec3 p(1e-4, -2e-4, 3e-5);
  const double off = dressed_potential(p, c);
  c.gravity_on = true;
  CHECK(dressed_potential(p, c) - off == doctest::Approx(c.atom.mass * 9.80665 * p.y()));
  // with B_y = 0 and beta = 0 the coupling is even in y
  const Vec3 q(p.x(), -p.y(), p.z());
  CHECK(dressed_potential(p, c) - dressed_potential(q, c) ==
        doctest::Approx(2 * c.atom.mass * 9.80665 * p.y()).epsilon(1e-9));
}

TEST_CASE("clamp only absorbs rounding") {
  std::mt19937_64 rng(5);
  const double r0 = fixtures::r0_oracle();
  for (int i = 0; i < 20000; ++i) {
    const auto c = random_rf(rng);
    const double scale = c.rf.b_x * c.rf.b_x + c.rf.b_y * c.rf.b_y + c.rf.b_z * c.rf.b_z;
    REQUIRE(rabi_bracket(random_torus_point(rng, r0), c) >= -1e-10 * scale);
  }
}

TEST_CASE("axis regularization is the azimuthal average") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_rf(rng);
    for (double z : {-1e-4, 0.5e-4, 2e-4}) {
      const double rho = 1e-9;
      double avg = 0.0;
      const int n = 720;
      for (int k = 0; k < n; ++k) {
        const double phi = 2 * kPi * k / n;
        avg += fixtures::bracket_oracle(rho * std::cos(phi), rho * std::sin(phi), z, c.rf);
      }
      avg /= n;
      const double scale = c.rf.b_x * c.rf.b_x + c.rf.b_y * c.rf.b_y + c.rf.b_z * c.rf.b_z;
      CHECK(rabi_bracket(Vec3(0, 0, z), c) == doctest::Approx(avg).scale(scale).epsilon(1e-9));
      CHECK(rabi_bracket(Vec3(1e-13, 0, z), c) == doctest::Approx(avg).scale(scale).epsilon(1e-9));
    }
    CHECK(rabi_bracket(Vec3::Zero(), c) ==
          doctest::Approx(c.rf.b_x * c.rf.b_x + c.rf.b_y * c.rf.b_y));
  }
}

TEST_CASE("sample_potential agrees with the scalar functions") {
  const auto c = fixtures::tilted();
  const Vec3 p(1.2e-4, 0.7e-4, -0.4e-4);
  const auto s = sample_potential(p, c);
  CHECK(s.potential == dressed_potential(p, c));
  CHECK(s.detuning == detuning(p, c));
  CHECK(s.rabi * s.rabi == doctest::Approx(rabi_squared(p, c)));
}

TEST_CASE("finite differences") {
  const auto c = fixtures::circular();
  const double r0 = fixtures::r0_oracle();
  const Vec3 p(0.8 * r0, 0.5 * r0, 0.1 * r0);
  const Vec3 g1 = potential_gradient(p, c, 1e-6), g2 = potential_gradient(p, c, 5e-7);
  CHECK((g1 - g2).norm() < 1e-3 * g2.norm());
  const Mat3 h = potential_hessian(p, c, 1e-6);
  CHECK((h - h.transpose()).norm() == 0.0);

  CHECK_THROWS_AS(potential_gradient(p, c, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(potential_hessian(Vec3(1e-7, 0, 1e-5), c, 1e-7), std::domain_error);
}
