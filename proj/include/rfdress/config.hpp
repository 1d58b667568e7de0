#pragma once

#include "rfdress/analysis.hpp"
#include "rfdress/imaging.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfdress {

/// Invalid configuration: unknown keys, bad values, unit-suffix mismatches.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat INI document: `[section]` headers, `key = value` lines, `#` or `;`
/// comments. Every entry remembers its source line for diagnostics.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "file:line" or "--set"
  };

  static IniDocument parse(const std::string& text, const std::string& source_name);

  /// Applies a `section.key=value` override.
  void set_override(const std::string& assignment);

  const Entry* find(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

struct ImagingSettings {
  double temperature = 20e-6;  // K
  double atom_number = 1e5;
  double pixel_size = 2.5e-6;  // m
  double half_width = 0.0;     // m, image half extent in the image plane
  double depth_half = 0.0;     // m, half extent along the line of sight
  std::size_t depth_nodes = 0;
  double cross_section = 1.0;
  double noise_rel = 0.0;  // noise sigma relative to the image peak
  std::uint64_t noise_seed = 1;
  int n_diameters = 16;
  Axis axis = Axis::Z;
};

struct SweepSettings {
  std::vector<double> omegas;            // rad/s
  std::vector<RfAmplitudes> amplitudes;  // empty or one per omega
  std::string amplitude_table;           // source path, for the echo
};

struct OutputSettings {
  std::string directory = "out";
  bool csv = true;
  bool binary = true;
};

struct RunConfig {
  std::string species = "Rb87";
  TrapConfig trap;
  Box region;
  Dims dims{201, 201, 1};
  AnalysisOptions analysis;
  ImagingSettings imaging;
  SweepSettings sweep;
  OutputSettings output;
};

/// Builds a validated RunConfig; every missing key takes its documented
/// default. Throws ConfigError naming the offending field and its origin.
RunConfig build_run_config(const IniDocument& doc);

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Resolved configuration with every default materialized, in the same INI
/// vocabulary (G, G/cm, MHz, deg, um, uK).
std::string resolved_config_text(const RunConfig& cfg);

}  // namespace rfdress
