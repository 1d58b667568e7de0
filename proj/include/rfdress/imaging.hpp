#pragma once

#include "rfdress/fields.hpp"
#include "rfdress/grid.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfdress {

class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 2D map, x fastest: index = i + nx * j.
struct SyntheticImage {
  double pixel_size = 0.0;  // m, square pixels
  std::size_t nx = 0;
  std::size_t ny = 0;
  double origin_u = 0.0;  // m, coordinate of pixel (0, 0) along the first image axis
  double origin_v = 0.0;
  std::array<std::string, 2> axis_labels{"x", "y"};
  std::string units = "atoms/m^2";
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i + nx * j]; }
  /// Trapezoidal integral over the image area.
  double integral() const;
  /// Bilinear interpolation at fractional pixel coordinates; 0 outside.
  double sample(double pi, double pj) const;
};

/// n(r) = N exp(-(V - V_min) / k_B T) / Z, normalized with the trapezoidal rule
/// so that the 3D integral equals `atom_number`.
ScalarGrid thermal_density(const TrapConfig& cfg, double temperature, const Box& region, const Dims& dims,
                           double atom_number);

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Trapezoidal line-of-sight integral of a density grid along `axis`.
SyntheticImage column_density(const ScalarGrid& density, Axis axis);

/// Multiplies every pixel by `cross_section` (optical-density proxy).
SyntheticImage optical_density(SyntheticImage image, double cross_section);

/// Adds zero-mean Gaussian noise of standard deviation `sigma`, clamping at 0.
void add_gaussian_noise(SyntheticImage& image, double sigma, std::uint64_t seed);

struct TwoGaussianFit {
  // Component 1 has the smaller center.
  double amplitude1 = 0.0, center1 = 0.0, width1 = 0.0;
  double amplitude2 = 0.0, center2 = 0.0, width2 = 0.0;
  double residual = 0.0;  // rms, in the units of the profile values
  int iterations = 0;
  bool degenerate = false;  // centers closer than one sample spacing
};

/// Levenberg-Marquardt fit of a1 g(c1, s1) + a2 g(c2, s2), six free
/// parameters. Starts from the highest local maximum on each side of the
/// profile centroid with widths a quarter of their separation. Stops when the
/// relative cost decrease falls below 1e-10 or after 200 iterations. Throws
/// MeasurementError on bad input or when the damped normal equations stay
/// singular after 8 tenfold damping increases.
TwoGaussianFit fit_two_gaussians(std::span<const double> positions, std::span<const double> values);

struct DiameterFit {
  double angle = 0.0;   // rad
  double radius = 0.0;  // m, half the peak separation
  double residual = 0.0;
  bool ok = false;
  std::string note;
};

struct RadiusMeasurement {
  double radius = 0.0;       // m, mean over accepted diameters
  double uncertainty = 0.0;  // m, sample standard deviation
  double center_u = 0.0;     // m, intensity centroid
  double center_v = 0.0;
  std::vector<DiameterFit> per_diameter;
};

/// Two-Gaussian fits along n_diameters diameters through the intensity
/// centroid at angles pi k / n. Failed diameters are flagged and excluded.
RadiusMeasurement measure_ring_radius(const SyntheticImage& image, int n_diameters);

// ---------------------------------------------------------------------------
// Export / import

struct ImageHeader {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double pixel_size = 0.0;
  double origin_u = 0.0;
  double origin_v = 0.0;
  double scale = 1.0;  // value per 16-bit code
  std::array<std::string, 2> axis_labels{"x", "y"};
  std::string units;
};

/// Scale used by the 16-bit export: max value / 65535 (1 for an all-zero image).
double u16_scale(const SyntheticImage& image);

void write_image_csv(const std::string& path, const SyntheticImage& image);
void write_image_u16(const std::string& path, const SyntheticImage& image);
void write_image_header(const std::string& path, const SyntheticImage& image);

ImageHeader read_image_header(const std::string& path);
SyntheticImage read_image_csv(const std::string& path, const ImageHeader& header);
SyntheticImage read_image_u16(const std::string& path, const ImageHeader& header);

}  // namespace rfdress
