#include "doctest.h"

#include "rfdress/fields.hpp"
#include "rfdress/units.hpp"

#include "fixtures.hpp"

#include <random>
#include <stdexcept>

using namespace rfdress;

TEST_CASE("quadrupole field is B_q (x, y, -2z)") {
  QuadrupoleConfig q{1.0};
  const Vec3 b = quadrupole_field(Vec3(1e-3, -2e-3, 0.5e-3), q);
  CHECK(b.x() == doctest::Approx(1e-3));
  CHECK(b.y() == doctest::Approx(-2e-3));
  CHECK(b.z() == doctest::Approx(-1e-3));
  CHECK(field_magnitude(Vec3(3e-3, 0, 2e-3), q) == doctest::Approx(5e-3));
  CHECK(field_magnitude(Vec3::Zero(), q) == 0.0);
}

TEST_CASE("rubidium preset") {
  const auto rb = AtomSpecies::rubidium87();
  CHECK(rb.mass == doctest::Approx(1.44316e-25).epsilon(1e-5));
  CHECK(rb.g_F == 0.5);
  CHECK(rb.m_F == 2);
  CHECK_NOTHROW(rb.validate());
}

TEST_CASE("config validation rejects unphysical inputs") {
  auto c = fixtures::circular();
  CHECK_NOTHROW(c.validate());
  {
    auto d = c;
    d.atom.g_F = -0.5;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  {
    auto d = c;
    d.atom.m_F = 0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  {
    auto d = c;
    d.atom.mass = 0.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  {
    auto d = c;
    d.quad.gradient = -1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  {
    auto d = c;
    d.rf.b_x = -1e-5;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  {
    auto d = c;
    d.rf.omega = 0.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
}

TEST_CASE("phase wrapping") {
  CHECK(wrap_angle(fixtures::kPi) == doctest::Approx(fixtures::kPi));
  CHECK(wrap_angle(-fixtures::kPi) == doctest::Approx(fixtures::kPi));
  CHECK(wrap_angle(3 * fixtures::kPi / 2) == doctest::Approx(-fixtures::kPi / 2));
  RfConfig rf;
  rf.alpha = 5 * fixtures::kPi / 2;
  rf.omega = 1.0;
  rf.normalize();
  CHECK(rf.alpha == doctest::Approx(fixtures::kPi / 2));
}

TEST_CASE("unit conversions") {
  CHECK(convert_units(100.0, Unit::GaussPerCm, Unit::TeslaPerMeter) == doctest::Approx(1.0));
  CHECK(convert_units(0.7, Unit::Gauss, Unit::Tesla) == doctest::Approx(0.7e-4));
  CHECK(convert_units(1.5, Unit::MHz, Unit::RadPerSecond) == doctest::Approx(9.42477796e6));
  CHECK(convert_units(180.0, Unit::Degree, Unit::Radian) == doctest::Approx(fixtures::kPi));
  CHECK(convert_units(1.0, Unit::MicroKelvin, Unit::Joule) == doctest::Approx(1.380649e-29));
  CHECK(convert_units(3.25, Unit::Gauss, Unit::Gauss) == 3.25);
  CHECK_THROWS_AS(convert_units(1.0, Unit::Gauss, Unit::MHz), std::invalid_argument);
  CHECK(unit_name(Unit::GaussPerCm) == "G/cm");

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  const std::pair<Unit, Unit> pairs[] = {{Unit::Gauss, Unit::Tesla},
                                         {Unit::GaussPerCm, Unit::TeslaPerMeter},
                                         {Unit::MHz, Unit::RadPerSecond},
                                         {Unit::Degree, Unit::Radian},
                                         {Unit::MicroKelvin, Unit::Joule}};
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, mag(rng));
    for (auto [lab, si] : pairs) {
      const double back = convert_units(convert_units(v, lab, si), si, lab);
      REQUIRE(std::abs(back - v) <= 1e-12 * v);
    }
  }
}
