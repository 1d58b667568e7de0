// Acceptance criteria for the dressed-trap library. One PASS/FAIL line per
// criterion; the process exits non-zero when any criterion fails.
#include "rfdress/analysis.hpp"
#include "rfdress/commands.hpp"
#include "rfdress/imaging.hpp"
#include "rfdress/units.hpp"

#include "../fixtures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace rfdress;
using fixtures::kPi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

Vec3 torus_point(std::mt19937_64& rng, double r0) {
  std::uniform_real_distribution<double> rho(0.5 * r0, 1.5 * r0), phi(-kPi, kPi), z(-0.5 * r0, 0.5 * r0);
  const double p = phi(rng), r = rho(rng);
  return Vec3(r * std::cos(p), r * std::sin(p), z(rng));
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// 1 ------------------------------------------------------------------------
Outcome ring_radius_line() {
  const auto t0 = Clock::now();
  const auto cfg = fixtures::circular();
  std::vector<double> omegas, mhz;
  for (int k = 0; k <= 25; ++k) {
    mhz.push_back(0.5 + 0.1 * k);
    omegas.push_back(2 * kPi * mhz.back() * 1e6);
  }
  const auto rows = frequency_sweep(cfg, omegas);

  // least-squares line through (f, r0)
  const double n = static_cast<double>(rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double x = mhz[i], y = rows[i].resonance_radius / units::micrometer;
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double r2 = std::pow(n * sxy - sx * sy, 2) / ((n * sxx - sx * sx) * (n * syy - sy * sy));
  const double slope_oracle = 1.054571817e-34 * 2 * kPi * 1e6 / (0.5 * 9.2740100783e-24 * 1.0) / units::micrometer;

  double worst = 0.0;
  std::string failures;
  for (const auto& r : rows) {
    if (!r.error.empty()) failures = r.error;
    worst = std::max(worst, std::isfinite(r.numeric_radius) ? rel_diff(r.numeric_radius, r.resonance_radius) : 1.0);
  }
  const double elapsed = seconds_since(t0);
  // reference only: the z = 0 valley, which is not the criterion
  AnalysisOptions mid;
  mid.profile.domain = ValleyDomain::MidPlane;
  double worst_mid = 0.0;
  for (const auto& r : frequency_sweep(cfg, omegas, {}, mid))
    worst_mid = std::max(worst_mid, std::isfinite(r.numeric_radius) ? rel_diff(r.numeric_radius, r.resonance_radius) : 1.0);
  const bool slope_ok = std::abs(slope - 142.9) <= 1e-3 * 142.9 && std::abs(slope - slope_oracle) <= 1e-9 * slope_oracle &&
                        r2 > 1.0 - 1e-12;
  const bool numeric_ok = worst <= 0.02 && failures.empty();
  return {slope_ok && numeric_ok && elapsed < 10.0,
          fmt::format("slope {:.4f} um/MHz (R^2-1 = {:.1e}); worst numeric/resonance mismatch {:.2f}% "
                      "(z = 0 valley for reference: {:.4f}%); {:.2f} s{}",
                      slope, r2 - 1.0, 100 * worst, 100 * worst_mid, elapsed,
                      failures.empty() ? "" : "; row error: " + failures)};
}

// 2 ------------------------------------------------------------------------
Outcome rf_regimes() {
  const auto t0 = Clock::now();
  const std::pair<const char*, std::pair<TrapConfig, Geometry>> cases[] = {
      {"a", {fixtures::double_well(), Geometry::DoubleWell}},
      {"b", {fixtures::circular(), Geometry::SymmetricRing}},
      {"c", {fixtures::tilted(), Geometry::AsymmetricRing}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, c] : cases) {
    const auto ra = analyze_trap(c.first);
    ok = ok && ra.geometry == c.second;
    detail += fmt::format("({}) {} [want {}]{}; ", name, geometry_name(ra.geometry), geometry_name(c.second),
                          ra.low_confidence ? " low-confidence" : "");
  }
  const double elapsed = seconds_since(t0);
  return {ok && elapsed < 30.0, detail + fmt::format("{:.2f} s", elapsed)};
}

// 3 ------------------------------------------------------------------------
Outcome quasi_2d() {
  const auto c = fixtures::circular();
  const double r0 = resonance_radius(c);
  const double mg = c.atom.mass * PhysicalConstants::g_accel;
  std::string detail;
  bool ok = false;
  try {
    const auto m = find_minimum(c, Vec3(1.1 * r0, 0, 1e-5));
    detail = fmt::format("minimizer from (1.1 r0, 0, 10 um) ends at rho = {:.1f} um, z = {:.1f} um, V = {:.3g} uK; ",
                         std::hypot(m.position.x(), m.position.y()) / units::micrometer,
                         m.position.z() / units::micrometer, convert_units(m.potential, Unit::Joule, Unit::MicroKelvin));
    const Vec3 g = potential_gradient(m.position, c, std::min(kDefaultFdStep, 0.25 * std::hypot(m.position.x(), m.position.y())));
    const auto tf = trap_frequencies(c, m.position);
    ok = tf.omega_z / tf.omega_rho > 1.0 && tf.curvatures.minCoeff() >= 0.0 && g.norm() < 1e-8 * mg;
    detail += fmt::format("omega_z/omega_rho = {:.3f}, min curvature {:.3e} J/m^2, |grad V| = {:.2e} m g",
                          tf.omega_z / tf.omega_rho, tf.curvatures.minCoeff(), g.norm() / mg);
  } catch (const std::exception& e) {
    detail += fmt::format("no harmonic minimum: {}", e.what());
  }
  // the z = 0 ring for reference
  const Vec3 ring(r0, 0, 0);
  detail += fmt::format("; on the z = 0 ring |dV/dz| = {:.3e} m g",
                        std::abs(potential_gradient(ring, c).z()) / mg);
  return {ok, detail};
}

// 4 ------------------------------------------------------------------------
Outcome gravity_criteria() {
  auto c = fixtures::circular();
  const auto rep = criteria_report(c);
  bool ok = std::abs(rep.kappa - 6.553) <= 1e-3 && rep.kappa < 13.0;
  ok = ok && rep.coupling_dominated == (rep.omega_over_rabi < rep.kappa);

  auto weak = fixtures::base(0.476, 0.476, 0.0, -kPi / 2, 0.0);
  const auto w = criteria_report(weak);
  const double ratio = w.omega_over_rabi;
  ok = ok && std::abs(ratio - 9.0) < 0.05;
  // kappa is linear in the gradient while omega/Omega on the ring is not affected by it
  const double crossing = weak.quad.gradient * ratio / w.kappa;
  bool flips = true;
  for (double f : {0.5, 1.0 - 1e-6, 1.0 + 1e-6, 2.0}) {
    auto s = weak;
    s.quad.gradient = crossing * f;
    const auto r = criteria_report(s);
    flips = flips && r.coupling_dominated == (r.omega_over_rabi < r.kappa) && r.coupling_dominated == (f > 1.0);
  }
  ok = ok && flips;
  return {ok, fmt::format("kappa = {:.5f}; omega/Omega (0.7 G) = {:.4f} -> coupling_dominated = {}; "
                          "0.476 G gives omega/Omega = {:.4f}; flag flips at B_q = {:.2f} G/cm: {}",
                          rep.kappa, rep.omega_over_rabi, rep.coupling_dominated, ratio, crossing * 100,
                          flips ? "yes" : "no")};
}

// 5 ------------------------------------------------------------------------
Outcome symmetry_suite() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(0.1, 1.0), ang(-kPi, kPi);
  const int n = 10000;
  double worst_lin = 0, worst_circ = 0, worst_beta = 0;
  for (int i = 0; i < n; ++i) {
    const auto lin = fixtures::base(amp(rng), 0, 0, ang(rng), ang(rng));
    const double r0 = resonance_radius(lin);
    const Vec3 p = torus_point(rng, r0);
    const double v = dressed_potential(p, lin);
    for (const Vec3& q : {Vec3(-p.x(), p.y(), p.z()), Vec3(p.x(), -p.y(), p.z()), Vec3(p.x(), p.y(), -p.z())})
      worst_lin = std::max(worst_lin, rel_diff(v, dressed_potential(q, lin)));

    const double b = amp(rng);
    const auto circ = fixtures::base(b, b, 0, ang(rng) < 0 ? -kPi / 2 : kPi / 2, 0);
    const double rho = std::hypot(p.x(), p.y());
    const double v0 = dressed_potential(Vec3(rho, 0, p.z()), circ);
    if (i < 200) {
      for (int k = 0; k < 360; ++k) {
        const double phi = 2 * kPi * k / 360;
        worst_circ = std::max(worst_circ, rel_diff(v0, dressed_potential(Vec3(rho * std::cos(phi), rho * std::sin(phi), p.z()), circ)));
      }
    } else {
      const double phi = ang(rng);
      worst_circ = std::max(worst_circ, rel_diff(v0, dressed_potential(Vec3(rho * std::cos(phi), rho * std::sin(phi), p.z()), circ)));
    }

    const double beta = ang(rng);
    const auto tilt_p = fixtures::base(amp(rng), 0, amp(rng), ang(rng), beta);
    auto tilt_m = tilt_p;
    tilt_m.rf.beta = -beta;
    worst_beta = std::max(worst_beta, rel_diff(dressed_potential(p, tilt_p), dressed_potential(Vec3(p.x(), -p.y(), p.z()), tilt_m)));
  }
  const bool ok = worst_lin <= 1e-12 && worst_circ <= 1e-9 && worst_beta <= 1e-12;
  return {ok, fmt::format("{} points: linear reflections {:.1e}, circular azimuthal spread {:.1e}, beta reflection {:.1e}",
                          n, worst_lin, worst_circ, worst_beta)};
}

// 6 ------------------------------------------------------------------------
Outcome oracle_equivalence() {
  const std::pair<const char*, TrapConfig> cases[] = {
      {"a", fixtures::double_well()}, {"b", fixtures::circular()}, {"c", fixtures::tilted()}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, c] : cases) {
    const double r0 = resonance_radius(c);
    const Box box{Vec3(-1.5 * r0, -1.5 * r0, -r0), Vec3(1.5 * r0, 1.5 * r0, r0)};
    const Dims dims{161, 161, 161};
    const auto grid = sample_grid(c, box, dims);
    const std::size_t best = grid.argmin();
    const double v_grid = grid.values()[best];
    // cell variation: largest rise from the grid minimum to any of its neighbours
    const auto& d = grid.dims();
    const std::size_t bi = best % d[0], bj = (best / d[0]) % d[1], bk = best / (d[0] * d[1]);
    double bound = 0.0;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj)
        for (int dk = -1; dk <= 1; ++dk) {
          const long i = long(bi) + di, j = long(bj) + dj, k = long(bk) + dk;
          if (i < 0 || j < 0 || k < 0 || i >= long(d[0]) || j >= long(d[1]) || k >= long(d[2])) continue;
          bound = std::max(bound, grid.at(i, j, k) - v_grid);
        }
    const auto ra = analyze_trap(c);
    const double v_opt = ra.minima.empty() ? std::numeric_limits<double>::infinity() : ra.minima.front().potential;
    const bool this_ok = std::abs(v_opt - v_grid) <= bound;
    ok = ok && this_ok;
    auto uk = [](double j) { return convert_units(j, Unit::Joule, Unit::MicroKelvin); };
    detail += fmt::format("({}) |dV| = {:.2e} uK vs bound {:.2e} uK{}; ", name, uk(std::abs(v_opt - v_grid)), uk(bound),
                          this_ok ? "" : " EXCEEDED");
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 7 ------------------------------------------------------------------------
Outcome imaging_round_trip() {
  const auto c = fixtures::circular();
  const double r0 = resonance_radius(c);
  const double pixel = 2.5e-6;
  const auto n_plane = static_cast<std::size_t>(std::llround(4.0 * r0 / pixel)) + 1;
  const double half = 0.5 * (n_plane - 1) * pixel;
  const Box box{Vec3(-half, -half, -r0), Vec3(half, half, r0)};
  const auto density = thermal_density(c, 20e-6, box, {n_plane, n_plane, 161}, 1e5);
  const auto img = column_density(density, Axis::Z);
  double clean_err = std::numeric_limits<double>::infinity();
  try {
    clean_err = std::abs(measure_ring_radius(img, 16).radius - 214.3e-6);
  } catch (const std::exception&) {
  }
  double peak = *std::max_element(img.values.begin(), img.values.end());
  std::vector<double> errs;
  int failed = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto noisy = img;
    add_gaussian_noise(noisy, 0.01 * peak, seed);
    try {
      errs.push_back(std::abs(measure_ring_radius(noisy, 16).radius - 214.3e-6));
    } catch (const std::exception&) {
      ++failed;
      errs.push_back(std::numeric_limits<double>::infinity());
    }
  }
  std::sort(errs.begin(), errs.end());
  const double p95 = errs[94];
  const bool ok = clean_err <= 5e-6 && p95 <= 10e-6;
  return {ok, fmt::format("clean error {:.2f} um (limit 5); noisy 95th percentile {:.2f} um (limit 10); {} failed fits",
                          clean_err / units::micrometer, p95 / units::micrometer, failed)};
}

// 8 ------------------------------------------------------------------------
Outcome finite_difference_health() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> amp(0.2, 1.0), ang(-kPi, kPi);
  int tested = 0, bad = 0;
  double lo = 1e300, hi = 0;
  while (tested < 100) {
    const auto c = fixtures::base(amp(rng), amp(rng), amp(rng), ang(rng), ang(rng));
    const double r0 = resonance_radius(c);
    const Vec3 p = torus_point(rng, r0);
    const auto s = sample_potential(p, c);
    if (!(s.rabi > 0.01 * c.rf.omega)) continue;  // smooth points only
    const double slope = c.atom.g_F * PhysicalConstants::mu_B * c.quad.gradient / PhysicalConstants::hbar;
    const double length = std::min(std::hypot(s.detuning, s.rabi) / (2 * slope), r0);
    const double h = length / 10;
    ++tested;
    const Vec3 g1 = potential_gradient(p, c, h), g2 = potential_gradient(p, c, h / 2), g3 = potential_gradient(p, c, h / 4);
    const Mat3 h1 = potential_hessian(p, c, h), h2 = potential_hessian(p, c, h / 2), h3 = potential_hessian(p, c, h / 4);
    const double rg = (g1 - g2).norm() / (g2 - g3).norm();
    const double rh = (h1 - h2).norm() / (h2 - h3).norm();
    for (double r : {rg, rh}) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      if (!(std::abs(r - 4.0) <= 0.8)) ++bad;
    }
  }
  // clamp activations
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long clamps = 0;
  double worst_clamp = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto c = fixtures::base(unit(rng), unit(rng), unit(rng), ang(rng), ang(rng));
    const double scale = c.rf.b_x * c.rf.b_x + c.rf.b_y * c.rf.b_y + c.rf.b_z * c.rf.b_z;
    const double b = rabi_bracket(torus_point(rng, resonance_radius(c)), c);
    if (b < 0.0) {
      ++clamps;
      worst_clamp = std::max(worst_clamp, -b / scale);
    }
  }
  const bool ok = bad == 0 && worst_clamp <= 1e-10;
  return {ok, fmt::format("Richardson ratios in [{:.3f}, {:.3f}] over {} points ({} outside 4 +- 20%); "
                          "{} clamp activations, largest {:.1e} of the amplitude scale",
                          lo, hi, tested, bad, clamps, worst_clamp)};
}

// 9 ------------------------------------------------------------------------
Outcome determinism_and_formats() {
  const fs::path root = fs::path(RFDRESS_TEST_TMP);
  fs::remove_all(root);
  auto doc = IniDocument::parse(
      "[rf]\nbx_G = 0.7\nby_G = 0.7\nalpha_deg = -90\n[analysis]\nnx = 81\nny = 81\n"
      "[imaging]\npixel_um = 5\ndepth_nodes = 61\nnoise_rel = 0.01\n[sweep]\nfreqs_MHz = 1, 2\n",
      "acceptance.ini");
  const RunConfig cfg = build_run_config(doc);
  std::vector<std::string> mismatched;
  for (int run = 0; run < 2; ++run) {
    const fs::path d = root / fmt::format("run{}", run);
    for (auto f : {run_potential, run_analyze, run_sweep, run_image}) {
      try {
        f(cfg, d);
      } catch (const IncompleteResultError&) {
        // outputs are written before the incomplete-result report
      }
    }
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root / "run0")) {
    ++files;
    if (slurp(e.path()) != slurp(root / "run1" / e.path().filename())) mismatched.push_back(e.path().filename().string());
  }

  // export / import
  const auto hdr = read_image_header((root / "run0" / "image.hdr").string());
  const auto img = read_image_csv((root / "run0" / "image.csv").string(), hdr);
  write_image_csv((root / "reexport.csv").string(), img);
  const bool csv_exact = slurp(root / "reexport.csv") == slurp(root / "run0" / "image.csv");
  const auto q = read_image_u16((root / "run0" / "image.u16").string(), hdr);
  write_image_u16((root / "reexport.u16").string(), q);
  const bool u16_exact = slurp(root / "reexport.u16") == slurp(root / "run0" / "image.u16");

  // unit round trips
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mag(-8.0, 8.0);
  double worst = 0.0;
  const std::pair<Unit, Unit> pairs[] = {{Unit::GaussPerCm, Unit::TeslaPerMeter},
                                         {Unit::Gauss, Unit::Tesla},
                                         {Unit::MHz, Unit::RadPerSecond},
                                         {Unit::Degree, Unit::Radian},
                                         {Unit::MicroKelvin, Unit::Joule}};
  for (int i = 0; i < 100000; ++i) {
    const double v = std::pow(10.0, mag(rng));
    for (auto [lab, si] : pairs) worst = std::max(worst, rel_diff(convert_units(convert_units(v, lab, si), si, lab), v));
  }
  std::string mism;
  for (const auto& m : mismatched) mism += " " + m;
  const bool ok = mismatched.empty() && files >= 10 && csv_exact && u16_exact && worst <= 1e-12;
  return {ok, fmt::format("{} output files byte-identical across runs{}; csv re-export {}; u16 re-export {}; "
                          "unit round trip {:.1e}",
                          files, mism.empty() ? "" : " except" + mism, csv_exact ? "exact" : "differs",
                          u16_exact ? "exact" : "differs", worst)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"ring radius vs frequency", ring_radius_line},
      {"rf regime classification", rf_regimes},
      {"quasi-2D ring minimum", quasi_2d},
      {"gravity criteria", gravity_criteria},
      {"symmetry suite", symmetry_suite},
      {"optimizer vs brute-force grid", oracle_equivalence},
      {"imaging round trip", imaging_round_trip},
      {"finite-difference health", finite_difference_health},
      {"determinism and formats", determinism_and_formats},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !o.pass;
    fmt::print("{} {}. {}: {}\n", o.pass ? "PASS" : "FAIL", index, name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
