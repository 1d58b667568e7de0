#include "rfdress/commands.hpp"

#include "rfdress/units.hpp"

#include <fmt/format.h>
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace rfdress {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

double to_uK(double joule) { return convert_units(joule, Unit::Joule, Unit::MicroKelvin); }
double to_um(double m) { return m / units::micrometer; }

// JSON has no NaN; missing values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void prepare_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError(fmt::format("cannot create output directory '{}'", out.string()));
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError(fmt::format("cannot write '{}'", p.string()));
  return os;
}

void finish(std::ofstream& os, const fs::path& p) {
  os.flush();
  if (!os) throw IoError(fmt::format("write failed for '{}'", p.string()));
}

void write_text(const fs::path& p, const std::string& text) {
  auto os = open_out(p);
  os << text;
  finish(os, p);
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

void echo_config(const RunConfig& cfg, const fs::path& out) {
  prepare_dir(out);
  write_text(out / "resolved_config.ini", resolved_config_text(cfg));
}

json vec_um(const Vec3& v) { return json::array({to_um(v.x()), to_um(v.y()), to_um(v.z())}); }

// Image products go through image_io, which reports failures as ios_base::failure.
template <class F>
void guarded_io(F&& f) {
  try {
    f();
  } catch (const std::ios_base::failure& e) {
    throw IoError(e.what());
  }
}

}  // namespace

int exit_code_for_current_exception(std::string& message) {
  try {
    throw;
  } catch (const ConfigError& e) {
    message = e.what();
    return kExitConfig;
  } catch (const IoError& e) {
    message = e.what();
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    message = e.what();
    return kExitIo;
  } catch (const NonConvergenceError& e) {
    message = e.what();
    return kExitNonConvergence;
  } catch (const NotAMinimumError& e) {
    message = e.what();
    return kExitNonConvergence;
  } catch (const MeasurementError& e) {
    message = e.what();
    return kExitNonConvergence;
  } catch (const IncompleteResultError& e) {
    message = e.what();
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    // physically inadmissible parameters that slipped past config validation
    message = e.what();
    return kExitConfig;
  } catch (const std::domain_error& e) {
    message = e.what();
    return kExitConfig;
  } catch (const std::exception& e) {
    message = e.what();
    return kExitFailure;
  }
}

double min_locus_radius(const ScalarGrid& grid, int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("min_locus_radius needs at least one bin");
  const auto& d = grid.dims();
  struct Bin {
    double v = std::numeric_limits<double>::infinity();
    double rho = kNaN;
  };
  std::vector<Bin> bins(static_cast<std::size_t>(n_bins));
  for (std::size_t j = 0; j < d[1]; ++j) {
    for (std::size_t i = 0; i < d[0]; ++i) {
      const Vec3 p = grid.position(i, j, 0);
      const double rho = std::hypot(p.x(), p.y());
      if (rho == 0.0) continue;
      const double phi = std::atan2(p.y(), p.x());
      auto b = static_cast<std::size_t>((phi + kPi) / (2.0 * kPi) * n_bins);
      b = std::min(b, bins.size() - 1);
      const double v = grid.at(i, j, 0);
      if (v < bins[b].v) bins[b] = {v, rho};
    }
  }
  double sum = 0.0;
  int n = 0;
  for (const auto& b : bins)
    if (std::isfinite(b.rho)) sum += b.rho, ++n;
  return n ? sum / n : kNaN;
}

void run_potential(const RunConfig& cfg, const fs::path& out) {
  echo_config(cfg, out);
  const ScalarGrid grid = sample_grid(cfg.trap, cfg.region, cfg.dims);
  grid.check_finite();
  const auto& d = grid.dims();
  const double vmin = grid.values()[grid.argmin()];

  if (cfg.output.csv) {
    const fs::path p = out / "potential.csv";
    auto os = open_out(p);
    os << "x_m,y_m,z_m,V_J,V_uK\n";
    for (std::size_t flat = 0; flat < grid.values().size(); ++flat) {
      const Vec3 r = grid.position(flat);
      const double v = grid.values()[flat];
      os << fmt::format("{},{},{},{},{}\n", r.x(), r.y(), r.z(), v, to_uK(v));
    }
    finish(os, p);
  }

  json j;
  j["dims"] = {d[0], d[1], d[2]};
  j["resonance_radius_um"] = to_um(resonance_radius(cfg.trap));
  j["min_V_uK"] = to_uK(vmin);
  j["max_V_uK"] = to_uK(grid.values()[grid.argmax()]);
  j["argmin_um"] = vec_um(grid.position(grid.argmin()));
  // the min-locus radius is only meaningful on an xy slice
  j["min_locus_radius_um"] = d[2] == 1 && d[0] > 1 && d[1] > 1 ? num(to_um(min_locus_radius(grid))) : json(nullptr);
  write_json(out / "potential_summary.json", j);
}

void run_analyze(const RunConfig& cfg, const fs::path& out) {
  echo_config(cfg, out);
  const RingAnalysis ra = analyze_trap(cfg.trap, cfg.analysis);
  const CriteriaReport cr = criteria_report(cfg.trap, cfg.analysis.gravity_threshold);

  if (cfg.output.csv) {
    const fs::path p = out / "profile.csv";
    auto os = open_out(p);
    os << "phi_rad,V_uK,rho_um,z_um,rabi_rad_s,converged,at_boundary\n";
    for (const auto& pt : ra.profile.points)
      os << fmt::format("{},{},{},{},{},{},{}\n", pt.azimuth, to_uK(pt.potential), to_um(pt.rho), to_um(pt.z), pt.rabi,
                        int(pt.converged), int(pt.at_boundary));
    finish(os, p);
  }

  json j;
  j["geometry"] = std::string(geometry_name(ra.geometry));
  j["low_confidence"] = ra.low_confidence;
  j["resonance_radius_um"] = to_um(ra.resonance_radius);
  j["ring_radius_um"] = num(to_um(ra.ring_radius));
  j["barrier_uK"] = to_uK(ra.barrier_height);
  j["depth_uK"] = to_uK(ra.depth);
  j["valley_hits_boundary"] = ra.profile.any_at_boundary();
  json mins = json::array();
  for (const auto& m : ra.minima)
    mins.push_back({{"position_um", vec_um(m.position)},
                    {"V_uK", to_uK(m.potential)},
                    {"azimuth_rad", m.azimuth},
                    {"refined", m.refined},
                    {"smooth", m.smooth}});
  j["minima"] = mins;
  if (ra.frequencies) {
    const auto& f = *ra.frequencies;
    j["trap_frequencies_Hz"] = {{"rho", f.omega_rho / (2 * kPi)},
                                {"phi", f.omega_phi / (2 * kPi)},
                                {"z", f.omega_z / (2 * kPi)}};
  } else {
    j["trap_frequencies_Hz"] = nullptr;
  }
  j["frequency_note"] = ra.frequency_note;
  j["criteria"] = {{"kappa", cr.kappa},
                   {"omega_over_rabi", num(cr.omega_over_rabi)},
                   {"coupling_dominated", cr.coupling_dominated},
                   {"gravity_negligible", cr.gravity_negligible},
                   {"ring_azimuth_rad", cr.ring_azimuth},
                   {"ring_rabi_rad_s", cr.ring_rabi}};
  write_json(out / "analysis.json", j);

  std::string rep;
  auto it = std::back_inserter(rep);
  fmt::format_to(it, "geometry:           {}{}\n", geometry_name(ra.geometry), ra.low_confidence ? " (low confidence)" : "");
  fmt::format_to(it, "resonance radius:   {:.3f} um\n", to_um(ra.resonance_radius));
  fmt::format_to(it, "valley radius:      {:.3f} um{}\n", to_um(ra.ring_radius),
                 ra.profile.any_at_boundary() ? "  (valley reaches the search boundary)" : "");
  fmt::format_to(it, "azimuthal barrier:  {:.4f} uK\n", to_uK(ra.barrier_height));
  fmt::format_to(it, "escape depth:       {:.4f} uK\n", to_uK(ra.depth));
  for (const auto& m : ra.minima)
    fmt::format_to(it, "minimum:            ({:.3f}, {:.3f}, {:.3f}) um  V = {:.4f} uK{}\n", to_um(m.position.x()),
                   to_um(m.position.y()), to_um(m.position.z()), to_uK(m.potential), m.refined ? "" : "  [unrefined]");
  if (ra.frequencies)
    fmt::format_to(it, "trap frequencies:   rho {:.2f} Hz, phi {:.2f} Hz, z {:.2f} Hz\n",
                   ra.frequencies->omega_rho / (2 * kPi), ra.frequencies->omega_phi / (2 * kPi),
                   ra.frequencies->omega_z / (2 * kPi));
  else
    fmt::format_to(it, "trap frequencies:   unavailable ({})\n", ra.frequency_note);
  fmt::format_to(it, "kappa:              {:.4f} ({})\n", cr.kappa,
                 cr.gravity_negligible ? "gravity negligible" : "gravity not negligible");
  fmt::format_to(it, "omega / Omega:      {:.4f} ({})\n", cr.omega_over_rabi,
                 cr.coupling_dominated ? "coupling dominated" : "not coupling dominated");
  write_text(out / "report.txt", rep);

  if (ra.geometry != Geometry::CenterTrap && !ra.minima.empty() && !ra.minima.front().refined)
    throw IncompleteResultError("3D refinement of the lowest valley point did not converge");
}

void run_sweep(const RunConfig& cfg, const fs::path& out) {
  echo_config(cfg, out);
  const auto rows = frequency_sweep(cfg.trap, cfg.sweep.omegas, cfg.sweep.amplitudes, cfg.analysis);
  const fs::path p = out / "sweep.csv";
  auto os = open_out(p);
  os << "freq_MHz,r_resonance_um,r_numeric_um,barrier_uK,geometry,note\n";
  std::size_t failed = 0;
  for (const auto& r : rows) {
    std::string note = r.error;
    if (note.empty()) {
      if (r.low_confidence) note = "low confidence";
      if (r.valley_at_boundary) note += note.empty() ? "valley on search boundary" : "; valley on search boundary";
    }
    for (char& c : note)
      if (c == ',' || c == '\n') c = ';';
    if (!r.error.empty()) ++failed;
    os << fmt::format("{},{},{},{},{},{}\n", convert_units(r.omega, Unit::RadPerSecond, Unit::MHz),
                      to_um(r.resonance_radius), std::isfinite(r.numeric_radius) ? fmt::format("{}", to_um(r.numeric_radius)) : "",
                      r.error.empty() ? fmt::format("{}", to_uK(r.barrier)) : "",
                      r.error.empty() ? std::string(geometry_name(r.geometry)) : "error", note);
  }
  finish(os, p);
  if (failed) throw IncompleteResultError(fmt::format("{} of {} sweep rows failed", failed, rows.size()));
}

void run_image(const RunConfig& cfg, const fs::path& out) {
  echo_config(cfg, out);
  const auto& im = cfg.imaging;
  const int ax = static_cast<int>(im.axis);
  const auto n_plane = static_cast<std::size_t>(std::llround(2.0 * im.half_width / im.pixel_size)) + 1;
  const double half = 0.5 * static_cast<double>(n_plane - 1) * im.pixel_size;
  Box region;
  Dims dims{};
  for (int a = 0; a < 3; ++a) {
    const double h = a == ax ? im.depth_half : half;
    region.lo[a] = -h;
    region.hi[a] = h;
    dims[a] = a == ax ? im.depth_nodes : n_plane;
  }
  const ScalarGrid density = thermal_density(cfg.trap, im.temperature, region, dims, im.atom_number);
  SyntheticImage img = optical_density(column_density(density, im.axis), im.cross_section);
  if (im.noise_rel > 0.0) {
    double peak = 0.0;
    for (double v : img.values) peak = std::max(peak, v);
    add_gaussian_noise(img, im.noise_rel * peak, im.noise_seed);
  }

  guarded_io([&] {
    if (cfg.output.csv) write_image_csv((out / "image.csv").string(), img);
    if (cfg.output.binary) write_image_u16((out / "image.u16").string(), img);
    write_image_header((out / "image.hdr").string(), img);
  });

  const RadiusMeasurement rm = measure_ring_radius(img, im.n_diameters);
  const fs::path p = out / "radius_diameters.csv";
  auto os = open_out(p);
  os << "angle_rad,radius_um,residual,ok,note\n";
  for (const auto& d : rm.per_diameter)
    os << fmt::format("{},{},{},{},{}\n", d.angle, d.ok ? fmt::format("{}", to_um(d.radius)) : "", d.residual,
                      int(d.ok), d.note);
  finish(os, p);
  json j;
  j["radius_um"] = to_um(rm.radius);
  j["uncertainty_um"] = to_um(rm.uncertainty);
  j["center_um"] = {to_um(rm.center_u), to_um(rm.center_v)};
  j["resonance_radius_um"] = to_um(resonance_radius(cfg.trap));
  std::size_t ok = 0;
  for (const auto& d : rm.per_diameter) ok += d.ok;
  j["diameters_used"] = ok;
  j["diameters_total"] = rm.per_diameter.size();
  write_json(out / "radius.json", j);
}

}  // namespace rfdress
