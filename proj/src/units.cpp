#include "rfdress/units.hpp"

#include "rfdress/fields.hpp"

#include <fmt/format.h>

#include <numbers>
#include <stdexcept>

namespace rfdress {

std::string_view unit_name(Unit u) {
  switch (u) {
    case Unit::Tesla: return "T";
    case Unit::Gauss: return "G";
    case Unit::TeslaPerMeter: return "T/m";
    case Unit::GaussPerCm: return "G/cm";
    case Unit::RadPerSecond: return "rad/s";
    case Unit::MHz: return "MHz";
    case Unit::Radian: return "rad";
    case Unit::Degree: return "deg";
    case Unit::Joule: return "J";
    case Unit::MicroKelvin: return "uK";
  }
  return "?";
}

namespace {

struct Pair {
  Unit base;     // SI side
  Unit derived;  // lab side
  double factor; // value_SI = value_lab * factor
};

constexpr Pair kPairs[] = {
    {Unit::Tesla, Unit::Gauss, units::gauss},
    {Unit::TeslaPerMeter, Unit::GaussPerCm, units::gauss_per_cm},
    {Unit::RadPerSecond, Unit::MHz, 2.0 * std::numbers::pi * 1e6},
    {Unit::Radian, Unit::Degree, std::numbers::pi / 180.0},
    {Unit::Joule, Unit::MicroKelvin, 1e-6 * PhysicalConstants::k_B},
};

}  // namespace

double convert_units(double value, Unit from, Unit to) {
  if (from == to) return value;
  for (const auto& p : kPairs) {
    if (from == p.derived && to == p.base) return value * p.factor;
    if (from == p.base && to == p.derived) return value / p.factor;
  }
  throw std::invalid_argument(
      fmt::format("unsupported unit conversion {} -> {}", unit_name(from), unit_name(to)));
}

}  // namespace rfdress
