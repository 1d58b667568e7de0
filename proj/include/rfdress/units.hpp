#pragma once

#include <string_view>

namespace rfdress {

enum class Unit {
  Tesla,
  Gauss,
  TeslaPerMeter,
  GaussPerCm,
  RadPerSecond,
  MHz,
  Radian,
  Degree,
  Joule,
  MicroKelvin,
};

std::string_view unit_name(Unit u);

/// Linear conversion between the supported pairs: G<->T, G/cm<->T/m,
/// MHz<->rad/s (angular), deg<->rad and uK<->J (through k_B). Converting a
/// unit to itself returns the value unchanged. Any other pair throws
/// std::invalid_argument.
double convert_units(double value, Unit from, Unit to);

namespace units {
constexpr double gauss = 1e-4;                // T
constexpr double gauss_per_cm = 1e-2;         // T/m
constexpr double micrometer = 1e-6;           // m
}  // namespace units

}  // namespace rfdress
