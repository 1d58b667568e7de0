#pragma once

#include "rfdress/dressed.hpp"
#include "rfdress/grid.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rfdress {

inline constexpr std::size_t kMaxGridNodes = 100'000'000;

/// Potential at every node of the lattice spanned by `region` and `dims`.
/// Throws std::invalid_argument for empty regions or more than kMaxGridNodes.
ScalarGrid sample_grid(const TrapConfig& cfg, const Box& region, const Dims& dims);

/// z = 0 radius of the resonance shell, hbar omega / (g_F mu_B B_q).
double resonance_radius(const TrapConfig& cfg);

// ---------------------------------------------------------------------------
// Azimuthal valley profile

enum class ValleyDomain {
  HalfPlane,  // minimize over (rho, z) at each azimuth
  MidPlane,   // minimize over rho with z = 0 (the xy-plane picture)
};

struct ProfileOptions {
  ValleyDomain domain = ValleyDomain::HalfPlane;
  double rho_min = 0.2;  // in units of the resonance radius
  double rho_max = 3.0;
  double z_extent = 1.0;
  int coarse_rho = 57;
  int coarse_z = 41;
};

struct ValleyPoint {
  double azimuth = 0.0;    // rad, in (-pi, pi]
  double potential = 0.0;  // J
  double rho = 0.0;        // m
  double z = 0.0;          // m
  double rabi = 0.0;       // rad/s at the valley floor
  bool converged = true;
  bool at_boundary = false;  // floor sits on the search-box edge
};

struct AzimuthalProfile {
  std::vector<ValleyPoint> points;
  double resonance_radius = 0.0;
  double omega = 0.0;
  double energy_scale = 0.0;  // m_F hbar omega, reference for tolerances

  double min_potential() const;
  double max_potential() const;
  bool any_at_boundary() const;
};

/// Valley floor at n_phi equally spaced azimuths phi_k = -pi + 2 pi (k+1)/n.
/// Non-converged azimuths are flagged, never thrown.
AzimuthalProfile azimuthal_profile(const TrapConfig& cfg, int n_phi, const ProfileOptions& options = {});

// ---------------------------------------------------------------------------
// Geometry classification

enum class Geometry { DoubleWell, SymmetricRing, AsymmetricRing, CenterTrap };
std::string_view geometry_name(Geometry g);

struct ClassifierTolerances {
  double rel_tol = 1e-3;    // ring flatness, relative to the profile energy scale
  double match_tol = 1e-2;  // relative depth mismatch still counted as a double well
};

struct Classification {
  Geometry geometry = Geometry::CenterTrap;
  bool low_confidence = false;
  std::vector<std::size_t> minima;  // profile indices of the retained wells
  std::vector<double> well_depths;  // J, same order as minima
};

/// symmetric-ring when the peak-to-peak variation is below rel_tol times the
/// energy scale; double-well for exactly two wells of matching depth;
/// asymmetric-ring otherwise; center-trap when the valley carries no
/// coupling anywhere. Wells shallower than rel_tol times the energy scale are
/// merged into their neighbours. Requires at least 64 azimuths.
Classification classify_geometry(const AzimuthalProfile& profile,
                                 const ClassifierTolerances& tolerances = {});

// ---------------------------------------------------------------------------
// Local minimization

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, Vec3 best, double best_value)
      : std::runtime_error(what), best_(std::move(best)), best_value_(best_value) {}
  const Vec3& best() const { return best_; }
  double best_value() const { return best_value_; }

 private:
  Vec3 best_;
  double best_value_;
};

class NotAMinimumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MinimumOptions {
  double fd_step = kDefaultFdStep;
  int max_iterations = 10000;
  double gradient_tol = 1e-8;  // in units of m g
  bool mid_plane = false;      // keep z = 0
  /// Search box half-widths in units of the resonance radius.
  double xy_extent = 4.0;
  double z_extent = 2.0;
};

struct MinimumResult {
  Vec3 position = Vec3::Zero();
  double potential = 0.0;
  double gradient_norm = 0.0;  // J/m, NaN when not polished
  double fd_step = 0.0;        // m, stencil the gradient norm was measured with
  bool smooth = false;         // coupling large enough for the gradient polish
  int iterations = 0;
};

/// Pattern search followed, where |Omega| > 0.01 omega, by a Newton polish on
/// the central-difference gradient until |grad V| < gradient_tol * m g. The
/// polish starts at options.fd_step and shrinks the stencil (down to
/// kMinFdStep) when the finite-difference bias stalls it.
MinimumResult find_minimum(const TrapConfig& cfg, const Vec3& start, const MinimumOptions& options = {});

struct TrapFrequencies {
  double omega_rho = 0.0;  // rad/s
  double omega_z = 0.0;
  double omega_phi = 0.0;  // 0 along a flat ring
  Vec3 curvatures = Vec3::Zero();  // eigenvalues paired to (rho, phi, z), J/m^2
};

/// Harmonic frequencies from the Hessian in the local (rho, phi, z) frame.
/// Throws NotAMinimumError for negative curvature along rho or z, for points
/// where the potential is not smooth on the scale of the stencil, and for
/// points inside the axis tube.
TrapFrequencies trap_frequencies(const TrapConfig& cfg, const Vec3& minimum, double h = kDefaultFdStep);

// ---------------------------------------------------------------------------
// Gravity criteria

struct CriteriaReport {
  double kappa = 0.0;
  double omega_over_rabi = 0.0;  // +inf when the coupling vanishes
  bool coupling_dominated = false;
  bool gravity_negligible = false;
  double ring_azimuth = 0.0;  // rad, lowest point of the z = 0 resonance circle
  double ring_rabi = 0.0;     // rad/s there
};

/// kappa = g_F m_F mu_B B_q / (m g). The coupling is evaluated at the lowest
/// point of the toroidal ring, i.e. of V on the z = 0 resonance circle.
CriteriaReport criteria_report(const TrapConfig& cfg, double gravity_threshold = 5.0);

// ---------------------------------------------------------------------------
// Full analysis and sweeps

struct AnalysisOptions {
  int n_phi = 64;
  ProfileOptions profile;
  ClassifierTolerances tolerances;
  MinimumOptions minimum;
  double gravity_threshold = 5.0;
};

struct LocatedMinimum {
  Vec3 position = Vec3::Zero();
  double potential = 0.0;
  double azimuth = 0.0;
  bool smooth = false;
  bool refined = false;  // false when the 3D refinement failed and the valley point is kept
};

struct RingAnalysis {
  Geometry geometry = Geometry::CenterTrap;
  bool low_confidence = false;
  double resonance_radius = 0.0;
  double ring_radius = 0.0;  // azimuth-averaged valley radius
  std::vector<LocatedMinimum> minima;  // ascending in V
  double barrier_height = 0.0;
  double depth = 0.0;
  std::optional<TrapFrequencies> frequencies;
  std::string frequency_note;
  AzimuthalProfile profile;
};

/// Escape estimate: over the six axis directions, the smallest rise to the
/// first local maximum of V along a ray from `minimum`.
double escape_depth(const TrapConfig& cfg, const Vec3& minimum);

RingAnalysis analyze_trap(const TrapConfig& cfg, const AnalysisOptions& options = {});

struct RfAmplitudes {
  double b_x = 0.0;
  double b_y = 0.0;
  double b_z = 0.0;
};

struct SweepRow {
  double omega = 0.0;
  double resonance_radius = 0.0;
  double numeric_radius = 0.0;  // NaN when there is no off-center valley
  double barrier = 0.0;
  Geometry geometry = Geometry::CenterTrap;
  bool low_confidence = false;
  bool valley_at_boundary = false;  // some valley point sits on the search-box edge
  std::string error;  // non-empty when the row failed
};

/// One profile analysis per angular frequency; `amplitudes`, when non-empty,
/// must match `omegas` in length and overrides the rf amplitudes per row.
std::vector<SweepRow> frequency_sweep(const TrapConfig& cfg, std::span<const double> omegas,
                                      std::span<const RfAmplitudes> amplitudes = {},
                                      const AnalysisOptions& options = {});

}  // namespace rfdress
