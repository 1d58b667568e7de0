#include "rfdress/analysis.hpp"

#include "rfdress/minimize.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace rfdress {

namespace {

using PC = PhysicalConstants;
constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec3 cylindrical(double rho, double phi, double z) {
  return Vec3(rho * std::cos(phi), rho * std::sin(phi), z);
}

double larmor_slope(const TrapConfig& cfg) {
  return cfg.atom.g_F * PC::mu_B * cfg.quad.gradient / PC::hbar;
}

}  // namespace

ScalarGrid sample_grid(const TrapConfig& cfg, const Box& region, const Dims& dims) {
  const double nodes = static_cast<double>(dims[0]) * static_cast<double>(dims[1]) *
                       static_cast<double>(dims[2]);
  if (nodes > static_cast<double>(kMaxGridNodes))
    throw std::invalid_argument(fmt::format(
        "grid of {}x{}x{} nodes exceeds the {:.0e} node limit; reduce dims or collapse an axis",
        dims[0], dims[1], dims[2], static_cast<double>(kMaxGridNodes)));
  const Lattice lat = make_lattice(region, dims);
  ScalarGrid grid(lat.origin, lat.spacing, dims, "J");
  auto& v = grid.values();
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = dressed_potential(grid.position(n), cfg);
  return grid;
}

double resonance_radius(const TrapConfig& cfg) {
  return PC::hbar * cfg.rf.omega / (cfg.atom.g_F * PC::mu_B * cfg.quad.gradient);
}

// ---------------------------------------------------------------------------

double AzimuthalProfile::min_potential() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::min(m, p.potential);
  return m;
}

double AzimuthalProfile::max_potential() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::max(m, p.potential);
  return m;
}

bool AzimuthalProfile::any_at_boundary() const {
  return std::any_of(points.begin(), points.end(), [](const ValleyPoint& p) { return p.at_boundary; });
}

namespace {

ValleyPoint valley_half_plane(const TrapConfig& cfg, double phi, double r0, const ProfileOptions& o) {
  const double rho_lo = o.rho_min * r0, rho_hi = o.rho_max * r0;
  const double z_lo = -o.z_extent * r0, z_hi = o.z_extent * r0;
  const double c = std::cos(phi), s = std::sin(phi);
  auto v_at = [&](double rho, double z) { return dressed_potential(Vec3(rho * c, rho * s, z), cfg); };

  const double d_rho = (rho_hi - rho_lo) / (o.coarse_rho - 1);
  const double d_z = (z_hi - z_lo) / (o.coarse_z - 1);
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d start(rho_lo, 0.0);
  for (int i = 0; i < o.coarse_rho; ++i) {
    for (int k = 0; k < o.coarse_z; ++k) {
      const double rho = rho_lo + i * d_rho, z = z_lo + k * d_z;
      const double v = v_at(rho, z);
      if (v < best) {
        best = v;
        start = {rho, z};
      }
    }
  }
  PatternSearchOptions ps;
  ps.initial_step = Eigen::Vector2d(d_rho, d_z);
  ps.min_step_fraction = 1e-9;
  const auto res = pattern_search([&](const Eigen::VectorXd& x) { return v_at(x[0], x[1]); }, start,
                                  Eigen::Vector2d(rho_lo, z_lo), Eigen::Vector2d(rho_hi, z_hi), ps);
  ValleyPoint p;
  p.azimuth = phi;
  p.rho = res.x[0];
  p.z = res.x[1];
  p.potential = res.value;
  p.converged = res.converged;
  const double edge = 1e-6 * r0;
  p.at_boundary = p.rho - rho_lo < edge || rho_hi - p.rho < edge || p.z - z_lo < edge || z_hi - p.z < edge;
  p.rabi = std::sqrt(rabi_squared(cylindrical(p.rho, phi, p.z), cfg));
  return p;
}

ValleyPoint valley_mid_plane(const TrapConfig& cfg, double phi, double r0, const ProfileOptions& o) {
  const double rho_lo = o.rho_min * r0, rho_hi = o.rho_max * r0;
  const double c = std::cos(phi), s = std::sin(phi);
  auto v_at = [&](double rho) { return dressed_potential(Vec3(rho * c, rho * s, 0.0), cfg); };
  const double d_rho = (rho_hi - rho_lo) / (o.coarse_rho - 1);
  double best = std::numeric_limits<double>::infinity();
  double start = rho_lo;
  for (int i = 0; i < o.coarse_rho; ++i) {
    const double rho = rho_lo + i * d_rho;
    const double v = v_at(rho);
    if (v < best) {
      best = v;
      start = rho;
    }
  }
  PatternSearchOptions ps;
  ps.initial_step = Eigen::VectorXd::Constant(1, d_rho);
  ps.min_step_fraction = 1e-9;
  const auto res = pattern_search([&](const Eigen::VectorXd& x) { return v_at(x[0]); },
                                  Eigen::VectorXd::Constant(1, start), Eigen::VectorXd::Constant(1, rho_lo),
                                  Eigen::VectorXd::Constant(1, rho_hi), ps);
  ValleyPoint p;
  p.azimuth = phi;
  p.rho = res.x[0];
  p.z = 0.0;
  p.potential = res.value;
  p.converged = res.converged;
  const double edge = 1e-6 * r0;
  p.at_boundary = p.rho - rho_lo < edge || rho_hi - p.rho < edge;
  p.rabi = std::sqrt(rabi_squared(cylindrical(p.rho, phi, 0.0), cfg));
  return p;
}

}  // namespace

AzimuthalProfile azimuthal_profile(const TrapConfig& cfg, int n_phi, const ProfileOptions& options) {
  if (n_phi < 8) throw std::invalid_argument(fmt::format("n_phi must be >= 8, got {}", n_phi));
  if (options.coarse_rho < 2 || options.coarse_z < 2 || !(options.rho_max > options.rho_min) ||
      !(options.rho_min > 0.0) || !(options.z_extent > 0.0))
    throw std::invalid_argument("invalid valley search box");
  AzimuthalProfile prof;
  prof.resonance_radius = resonance_radius(cfg);
  prof.omega = cfg.rf.omega;
  prof.energy_scale = cfg.atom.m_F * PC::hbar * cfg.rf.omega;
  prof.points.reserve(static_cast<std::size_t>(n_phi));
  for (int k = 0; k < n_phi; ++k) {
    const double phi = -kPi + 2.0 * kPi * (k + 1) / n_phi;
    prof.points.push_back(options.domain == ValleyDomain::HalfPlane
                              ? valley_half_plane(cfg, phi, prof.resonance_radius, options)
                              : valley_mid_plane(cfg, phi, prof.resonance_radius, options));
  }
  return prof;
}

// ---------------------------------------------------------------------------

std::string_view geometry_name(Geometry g) {
  switch (g) {
    case Geometry::DoubleWell: return "double-well";
    case Geometry::SymmetricRing: return "symmetric-ring";
    case Geometry::AsymmetricRing: return "asymmetric-ring";
    case Geometry::CenterTrap: return "center-trap";
  }
  return "unknown";
}

namespace {

struct Wells {
  std::vector<std::size_t> minima;
  std::vector<double> depths;
};

// Local minima of a periodic sequence, with wells shallower than `threshold`
// merged into their neighbours (lowest-persistence first).
Wells periodic_wells(const std::vector<double>& v, double threshold) {
  const std::size_t n = v.size();
  Wells w;
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = v[(i + n - 1) % n], next = v[(i + 1) % n];
    if (v[i] <= prev && v[i] < next) w.minima.push_back(i);
  }
  if (w.minima.empty()) return w;

  auto segment_max = [&](std::size_t a, std::size_t b) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = (a + 1) % n; i != b; i = (i + 1) % n) m = std::max(m, v[i]);
    return m;
  };
  auto depths_of = [&](const std::vector<std::size_t>& mins) {
    std::vector<double> d(mins.size());
    if (mins.size() == 1) {
      d[0] = *std::max_element(v.begin(), v.end()) - v[mins[0]];
      return d;
    }
    const std::size_t k = mins.size();
    std::vector<double> seg(k);  // seg[j]: max between mins[j] and mins[j+1]
    for (std::size_t j = 0; j < k; ++j) seg[j] = segment_max(mins[j], mins[(j + 1) % k]);
    for (std::size_t j = 0; j < k; ++j) d[j] = std::min(seg[(j + k - 1) % k], seg[j]) - v[mins[j]];
    return d;
  };

  w.depths = depths_of(w.minima);
  while (w.minima.size() > 1) {
    const auto it = std::min_element(w.depths.begin(), w.depths.end());
    if (*it >= threshold) break;
    w.minima.erase(w.minima.begin() + (it - w.depths.begin()));
    w.depths = depths_of(w.minima);
  }
  return w;
}

}  // namespace

Classification classify_geometry(const AzimuthalProfile& profile, const ClassifierTolerances& tol) {
  if (profile.points.size() < 64)
    throw std::invalid_argument(
        fmt::format("classification needs >= 64 azimuths, got {}", profile.points.size()));
  Classification c;
  const double omega = profile.omega;
  const bool coupled = std::any_of(profile.points.begin(), profile.points.end(),
                                   [&](const ValleyPoint& p) { return p.rabi > 1e-12 * omega; });
  if (!coupled || !(profile.resonance_radius > 0.0)) {
    c.geometry = Geometry::CenterTrap;
    return c;
  }

  std::vector<double> v;
  v.reserve(profile.points.size());
  for (const auto& p : profile.points) v.push_back(p.potential);
  const double ptp = profile.max_potential() - profile.min_potential();
  const double flat = tol.rel_tol * profile.energy_scale;

  if (ptp < flat) {
    c.geometry = Geometry::SymmetricRing;
    c.low_confidence = ptp >= 0.5 * flat;
    return c;
  }

  const Wells wells = periodic_wells(v, flat);
  const Wells half = periodic_wells(v, 0.5 * flat);
  c.minima = wells.minima;
  c.well_depths = wells.depths;
  c.low_confidence = half.minima.size() != wells.minima.size();

  if (wells.minima.size() == 2) {
    const double d0 = wells.depths[0], d1 = wells.depths[1];
    if (std::abs(d0 - d1) <= tol.match_tol * std::max(d0, d1)) {
      c.geometry = Geometry::DoubleWell;
      return c;
    }
  }
  c.geometry = Geometry::AsymmetricRing;
  return c;
}

// ---------------------------------------------------------------------------

MinimumResult find_minimum(const TrapConfig& cfg, const Vec3& start, const MinimumOptions& options) {
  if (std::hypot(start.x(), start.y()) <= kAxisEpsilon)
    throw std::invalid_argument("find_minimum: start point lies on the z-axis");
  const double r0 = resonance_radius(cfg);
  const double weight = cfg.atom.mass * PC::g_accel;
  const double grad_tol = options.gradient_tol * weight;

  MinimumResult out;
  Vec3 x;
  if (options.mid_plane) {
    const Eigen::Vector2d lo(-options.xy_extent * r0, -options.xy_extent * r0);
    const Eigen::Vector2d hi = -lo;
    PatternSearchOptions ps;
    ps.initial_step = Eigen::Vector2d::Constant(0.02 * r0);
    ps.min_step_fraction = 1e-10;
    ps.max_iterations = options.max_iterations;
    const auto res = pattern_search(
        [&](const Eigen::VectorXd& p) { return dressed_potential(Vec3(p[0], p[1], 0.0), cfg); },
        Eigen::Vector2d(start.x(), start.y()), lo, hi, ps);
    x = Vec3(res.x[0], res.x[1], 0.0);
    out.iterations = res.iterations;
    if (!res.converged)
      throw NonConvergenceError(
          fmt::format("pattern search did not converge in {} iterations", options.max_iterations), x,
          res.value);
  } else {
    const Eigen::Vector3d lo(-options.xy_extent * r0, -options.xy_extent * r0, -options.z_extent * r0);
    const Eigen::Vector3d hi = -lo;
    PatternSearchOptions ps;
    ps.initial_step = Eigen::Vector3d::Constant(0.02 * r0);
    ps.min_step_fraction = 1e-10;
    ps.max_iterations = options.max_iterations;
    const auto res = pattern_search(
        [&](const Eigen::VectorXd& p) { return dressed_potential(Vec3(p[0], p[1], p[2]), cfg); },
        Eigen::Vector3d(start), lo, hi, ps);
    x = res.x;
    out.iterations = res.iterations;
    if (!res.converged)
      throw NonConvergenceError(
          fmt::format("pattern search did not converge in {} iterations", options.max_iterations), x,
          res.value);
  }

  const PotentialSample s = sample_potential(x, cfg);
  const double rho = std::hypot(x.x(), x.y());
  out.smooth = s.rabi > 0.01 * cfg.rf.omega && rho > 2.0 * options.fd_step + kAxisEpsilon;
  out.gradient_norm = kNaN;

  if (out.smooth) {
    const int dims = options.mid_plane ? 2 : 3;
    // The central-difference gradient of a curved valley carries an O(h^2)
    // bias, so the step is shrunk whenever Newton stops making progress.
    double h = options.fd_step;
    auto grad = [&] {
      Vec3 g = potential_gradient(x, cfg, h);
      if (options.mid_plane) g.z() = 0.0;
      return g;
    };
    Vec3 g = grad();
    for (int it = 0; it < 100 && g.norm() >= grad_tol; ++it) {
      // Newton step on the positive-curvature subspace; a flat ring direction
      // has a near-zero eigenvalue and no gradient along it.
      const Mat3 hess = potential_hessian(x, cfg, h);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess.topLeftCorner(dims, dims));
      const Eigen::VectorXd lambda = eig.eigenvalues();
      const double floor = 1e-6 * lambda.cwiseAbs().maxCoeff();
      Eigen::VectorXd step = Eigen::VectorXd::Zero(dims);
      for (int k = 0; k < dims; ++k) {
        const Eigen::VectorXd v = eig.eigenvectors().col(k);
        if (lambda[k] > floor) step -= (v.dot(g.head(dims)) / lambda[k]) * v;
      }
      if (!step.allFinite()) break;
      if (step.norm() > 0.01 * r0) step *= 0.01 * r0 / step.norm();
      const double before = g.norm();
      x.head(dims) += step;
      ++out.iterations;
      g = grad();
      if (g.norm() > 0.5 * before && h > kMinFdStep) {
        h = std::max(kMinFdStep, 0.25 * h);
        g = grad();
      }
    }
    out.gradient_norm = g.norm();
    out.fd_step = h;
    if (!(out.gradient_norm < grad_tol))
      throw NonConvergenceError(
          fmt::format("gradient polish stalled at |grad V| = {:.3e} J/m (target {:.3e}, step {:.1e} m)",
                      out.gradient_norm, grad_tol, h),
          x, dressed_potential(x, cfg));
  }
  out.position = x;
  out.potential = dressed_potential(x, cfg);
  return out;
}

TrapFrequencies trap_frequencies(const TrapConfig& cfg, const Vec3& minimum, double h) {
  const double rho = std::hypot(minimum.x(), minimum.y());
  if (rho < 2.0 * h + kAxisEpsilon)
    throw NotAMinimumError(
        fmt::format("point at rho = {:.3e} m is inside the axis tube; no local (rho, phi, z) frame", rho));
  const PotentialSample s = sample_potential(minimum, cfg);
  // V varies on the length scale sqrt(delta^2 + Omega^2) / (d omega_0 / dr).
  const double smooth_length = std::hypot(s.detuning, s.rabi) / (2.0 * larmor_slope(cfg));
  if (smooth_length < 20.0 * h)
    throw NotAMinimumError(fmt::format(
        "potential is not smooth at this point (detuning and coupling both near zero, "
        "smoothness length {:.3e} m vs step {:.3e} m)",
        smooth_length, h));

  const Mat3 hess = potential_hessian(minimum, cfg, h);
  const double phi = std::atan2(minimum.y(), minimum.x());
  Mat3 frame;
  frame.col(0) = Vec3(std::cos(phi), std::sin(phi), 0.0);
  frame.col(1) = Vec3(-std::sin(phi), std::cos(phi), 0.0);
  frame.col(2) = Vec3(0.0, 0.0, 1.0);
  const Mat3 local = frame.transpose() * hess * frame;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(local);
  const Vec3 lambda = eig.eigenvalues();
  const Mat3 vecs = eig.eigenvectors();

  // Pair eigenvectors with the local axes by maximal total alignment.
  std::array<int, 3> perm{0, 1, 2}, best_perm = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int a = 0; a < 3; ++a) score += vecs(a, perm[a]) * vecs(a, perm[a]);
    if (score > best_score) {
      best_score = score;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  TrapFrequencies tf;
  tf.curvatures = Vec3(lambda[best_perm[0]], lambda[best_perm[1]], lambda[best_perm[2]]);
  if (tf.curvatures[0] < 0.0 || tf.curvatures[2] < 0.0)
    throw NotAMinimumError(fmt::format("negative curvature (rho: {:.3e}, z: {:.3e} J/m^2)",
                                       tf.curvatures[0], tf.curvatures[2]));
  const double m = cfg.atom.mass;
  tf.omega_rho = std::sqrt(tf.curvatures[0] / m);
  tf.omega_z = std::sqrt(tf.curvatures[2] / m);
  tf.omega_phi = tf.curvatures[1] > 0.0 ? std::sqrt(tf.curvatures[1] / m) : 0.0;
  if (tf.omega_phi < 1e-3 * tf.omega_rho) tf.omega_phi = 0.0;
  return tf;
}

// ---------------------------------------------------------------------------

CriteriaReport criteria_report(const TrapConfig& cfg, double gravity_threshold) {
  CriteriaReport rep;
  rep.kappa = cfg.atom.g_F * cfg.atom.m_F * PC::mu_B * cfg.quad.gradient / (cfg.atom.mass * PC::g_accel);
  rep.gravity_negligible = rep.kappa > gravity_threshold;

  const double r0 = resonance_radius(cfg);
  auto v_ring = [&](double phi) { return dressed_potential(cylindrical(r0, phi, 0.0), cfg); };
  constexpr int kSamples = 720;
  const double dphi = 2.0 * kPi / kSamples;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kSamples; ++k) {
    const double v = v_ring(-kPi + (k + 1) * dphi);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  const double centre = -kPi + (best + 1) * dphi;
  rep.ring_azimuth = wrap_angle(golden_section(v_ring, centre - dphi, centre + dphi, 1e-12));
  if (v_ring(rep.ring_azimuth) > best_v) rep.ring_azimuth = wrap_angle(centre);
  rep.ring_rabi = std::sqrt(rabi_squared(cylindrical(r0, rep.ring_azimuth, 0.0), cfg));
  if (rep.ring_rabi > 0.0) {
    rep.omega_over_rabi = cfg.rf.omega / rep.ring_rabi;
    rep.coupling_dominated = rep.omega_over_rabi < rep.kappa;
  } else {
    rep.omega_over_rabi = std::numeric_limits<double>::infinity();
    rep.coupling_dominated = false;
  }
  return rep;
}

double escape_depth(const TrapConfig& cfg, const Vec3& minimum) {
  const double r0 = resonance_radius(cfg);
  const double step = r0 / 500.0;
  const int n_steps = 1500;
  const double v0 = dressed_potential(minimum, cfg);
  double depth = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      Vec3 dir = Vec3::Zero();
      dir[axis] = sign;
      double prev = v0, peak = v0;
      for (int n = 1; n <= n_steps; ++n) {
        const double v = dressed_potential(minimum + (n * step) * dir, cfg);
        if (v < prev && prev > v0) break;
        prev = v;
        peak = std::max(peak, v);
      }
      depth = std::min(depth, peak - v0);
    }
  }
  return depth;
}

RingAnalysis analyze_trap(const TrapConfig& cfg, const AnalysisOptions& options) {
  RingAnalysis ra;
  ra.resonance_radius = resonance_radius(cfg);
  ra.profile = azimuthal_profile(cfg, options.n_phi, options.profile);
  const Classification cls = classify_geometry(ra.profile, options.tolerances);
  ra.geometry = cls.geometry;
  ra.low_confidence = cls.low_confidence;
  ra.barrier_height = ra.profile.max_potential() - ra.profile.min_potential();

  const auto& pts = ra.profile.points;
  if (ra.geometry == Geometry::CenterTrap) {
    ra.ring_radius = kNaN;
    ra.depth = 0.0;
    ra.frequency_note = "no off-center valley (no rf coupling)";
    return ra;
  }
  double sum_rho = 0.0;
  for (const auto& p : pts) sum_rho += p.rho;
  ra.ring_radius = sum_rho / static_cast<double>(pts.size());

  std::vector<std::size_t> seeds = cls.minima;
  if (seeds.empty()) {
    std::size_t lowest = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i].potential < pts[lowest].potential) lowest = i;
    seeds.push_back(lowest);
  }

  MinimumOptions mopt = options.minimum;
  mopt.mid_plane = options.profile.domain == ValleyDomain::MidPlane;
  for (std::size_t idx : seeds) {
    const auto& p = pts[idx];
    LocatedMinimum lm;
    lm.position = cylindrical(p.rho, p.azimuth, p.z);
    lm.potential = p.potential;
    lm.azimuth = p.azimuth;
    try {
      const MinimumResult mr = find_minimum(cfg, lm.position, mopt);
      // the gradient polish may end a hair above the valley floor it started from
      if (mr.potential <= lm.potential + 1e-9 * ra.profile.energy_scale) {
        lm.position = mr.position;
        lm.potential = mr.potential;
        lm.azimuth = std::atan2(mr.position.y(), mr.position.x());
        lm.smooth = mr.smooth;
        lm.refined = true;
      }
    } catch (const std::exception&) {
      // keep the valley point
    }
    ra.minima.push_back(lm);
  }
  std::stable_sort(ra.minima.begin(), ra.minima.end(),
                   [](const LocatedMinimum& a, const LocatedMinimum& b) { return a.potential < b.potential; });

  const Vec3& best = ra.minima.front().position;
  try {
    // shrink the stencil inside narrow avoided crossings
    const PotentialSample s = sample_potential(best, cfg);
    const double smooth_length = std::hypot(s.detuning, s.rabi) / (2.0 * larmor_slope(cfg));
    const double h = std::clamp(smooth_length / 50.0, kMinFdStep, mopt.fd_step);
    ra.frequencies = trap_frequencies(cfg, best, h);
  } catch (const std::exception& e) {
    ra.frequency_note = e.what();
  }
  ra.depth = escape_depth(cfg, best);
  return ra;
}

std::vector<SweepRow> frequency_sweep(const TrapConfig& cfg, std::span<const double> omegas,
                                      std::span<const RfAmplitudes> amplitudes,
                                      const AnalysisOptions& options) {
  if (omegas.empty()) throw std::invalid_argument("frequency sweep needs at least one frequency");
  if (!amplitudes.empty() && amplitudes.size() != omegas.size())
    throw std::invalid_argument(fmt::format("amplitude table has {} rows for {} frequencies",
                                            amplitudes.size(), omegas.size()));
  std::vector<SweepRow> rows;
  rows.reserve(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    SweepRow row;
    row.omega = omegas[i];
    row.numeric_radius = kNaN;
    try {
      TrapConfig c = cfg;
      c.rf.omega = omegas[i];
      if (!amplitudes.empty()) {
        c.rf.b_x = amplitudes[i].b_x;
        c.rf.b_y = amplitudes[i].b_y;
        c.rf.b_z = amplitudes[i].b_z;
      }
      c.validate();
      row.resonance_radius = resonance_radius(c);
      const AzimuthalProfile prof = azimuthal_profile(c, options.n_phi, options.profile);
      const Classification cls = classify_geometry(prof, options.tolerances);
      row.geometry = cls.geometry;
      row.low_confidence = cls.low_confidence;
      row.barrier = prof.max_potential() - prof.min_potential();
      row.valley_at_boundary = prof.any_at_boundary();
      if (cls.geometry != Geometry::CenterTrap) {
        double sum = 0.0;
        for (const auto& p : prof.points) sum += p.rho;
        row.numeric_radius = sum / static_cast<double>(prof.points.size());
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rfdress
