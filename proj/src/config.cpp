#include "rfdress/config.hpp"

#include "rfdress/units.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace rfdress {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"atom", {"species", "mass_kg", "g_F", "m_F"}},
      {"quadrupole", {"gradient_G_per_cm"}},
      {"rf", {"bx_G", "by_G", "bz_G", "alpha_deg", "beta_deg", "freq_MHz"}},
      {"gravity", {"enabled"}},
      {"analysis",
       {"x_min_um", "x_max_um", "y_min_um", "y_max_um", "z_min_um", "z_max_um", "nx", "ny", "nz", "n_phi",
        "rel_tol", "match_tol", "gravity_threshold", "valley", "fd_step_um"}},
      {"imaging",
       {"temperature_uK", "atom_number", "pixel_um", "half_width_um", "depth_half_um", "depth_nodes",
        "cross_section", "noise_rel", "noise_seed", "n_diameters", "axis"}},
      {"sweep", {"freqs_MHz", "start_MHz", "stop_MHz", "steps", "amplitude_table"}},
      {"output", {"directory", "formats"}},
  };
  return s;
}

std::string stem_of(const std::string& key) { return key.substr(0, key.find('_')); }

void check_known(const std::string& section, const std::string& key, const std::string& origin) {
  const auto& sch = schema();
  const auto sec = sch.find(section);
  if (sec == sch.end()) throw ConfigError(fmt::format("{}: unknown section [{}]", origin, section));
  if (sec->second.count(key)) return;
  std::string hint;
  for (const auto& k : sec->second)
    if (stem_of(k) == stem_of(key)) hint = fmt::format(" (expected unit-suffixed key '{}')", k);
  throw ConfigError(fmt::format("{}: unknown key '{}' in [{}]{}", origin, key, section, hint));
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  bool has(const char* sec, const char* key) const { return doc_.find(sec, key) != nullptr; }

  double real(const char* sec, const char* key, double fallback) const {
    const auto* e = doc_.find(sec, key);
    if (!e) return fallback;
    return parse_real(*e, sec, key);
  }

  double positive(const char* sec, const char* key, double fallback) const {
    const double v = real(sec, key, fallback);
    if (!(v > 0.0)) fail(sec, key, fmt::format("must be positive, got {}", v));
    return v;
  }

  double non_negative(const char* sec, const char* key, double fallback) const {
    const double v = real(sec, key, fallback);
    if (!(v >= 0.0)) fail(sec, key, fmt::format("must be >= 0, got {}", v));
    return v;
  }

  long long integer(const char* sec, const char* key, long long fallback) const {
    const auto* e = doc_.find(sec, key);
    if (!e) return fallback;
    long long v = 0;
    const auto& s = e->value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(sec, key, fmt::format("'{}' is not an integer", s));
    return v;
  }

  bool boolean(const char* sec, const char* key, bool fallback) const {
    const auto* e = doc_.find(sec, key);
    if (!e) return fallback;
    const auto& s = e->value;
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    fail(sec, key, fmt::format("'{}' is not a boolean", s));
  }

  std::string text(const char* sec, const char* key, const std::string& fallback) const {
    const auto* e = doc_.find(sec, key);
    return e ? e->value : fallback;
  }

  std::vector<double> list(const char* sec, const char* key) const {
    std::vector<double> out;
    const auto* e = doc_.find(sec, key);
    if (!e) return out;
    std::string_view rest(e->value);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      IniDocument::Entry item{trim(rest.substr(0, comma)), e->origin};
      out.push_back(parse_real(item, sec, key));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  [[noreturn]] void fail(const char* sec, const char* key, const std::string& msg) const {
    const auto* e = doc_.find(sec, key);
    throw ConfigError(fmt::format("{}: [{}] {}: {}", e ? e->origin : std::string("config"), sec, key, msg));
  }

 private:
  double parse_real(const IniDocument::Entry& e, const char* sec, const char* key) const {
    double v = 0.0;
    const auto& s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      throw ConfigError(fmt::format("{}: [{}] {}: '{}' is not a finite number", e.origin, sec, key, s));
    return v;
  }

  const IniDocument& doc_;
};

std::vector<std::pair<double, RfAmplitudes>> read_amplitude_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(fmt::format("[sweep] amplitude_table: cannot open '{}'", path));
  std::vector<std::pair<double, RfAmplitudes>> rows;
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("freq_MHz", 0) == 0) continue;  // header
    std::vector<double> cells;
    std::string_view rest(t);
    while (true) {
      const auto comma = rest.find(',');
      const std::string cell = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ConfigError(fmt::format("{}:{}: '{}' is not a number", path, n, cell));
      cells.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 4)
      throw ConfigError(fmt::format("{}:{}: expected freq_MHz,bx_G,by_G,bz_G", path, n));
    if (!(cells[0] > 0.0) || cells[1] < 0.0 || cells[2] < 0.0 || cells[3] < 0.0)
      throw ConfigError(fmt::format("{}:{}: frequency must be positive and amplitudes >= 0", path, n));
    rows.push_back({cells[0], RfAmplitudes{convert_units(cells[1], Unit::Gauss, Unit::Tesla),
                                           convert_units(cells[2], Unit::Gauss, Unit::Tesla),
                                           convert_units(cells[3], Unit::Gauss, Unit::Tesla)}});
  }
  if (rows.empty()) throw ConfigError(fmt::format("{}: amplitude table is empty", path));
  return rows;
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text, const std::string& source_name) {
  IniDocument doc;
  std::istringstream is(text);
  std::string line, section;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const std::string origin = fmt::format("{}:{}", source_name, n);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(fmt::format("{}: malformed section header '{}'", origin, t));
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      if (!schema().count(section)) throw ConfigError(fmt::format("{}: unknown section [{}]", origin, section));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}: expected 'key = value', got '{}'", origin, t));
    if (section.empty()) throw ConfigError(fmt::format("{}: key outside of any section", origin));
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    check_known(section, key, origin);
    auto& sec = doc.sections_[section];
    if (sec.count(key)) throw ConfigError(fmt::format("{}: duplicate key '{}' in [{}]", origin, key, section));
    sec[key] = Entry{value, origin};
  }
  return doc;
}

void IniDocument::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError(fmt::format("--set '{}': expected section.key=value", assignment));
  const std::string section = trim(std::string_view(assignment).substr(0, dot));
  const std::string key = trim(std::string_view(assignment).substr(dot + 1, eq - dot - 1));
  check_known(section, key, "--set");
  sections_[section][key] = Entry{trim(std::string_view(assignment).substr(eq + 1)), "--set " + assignment};
}

const IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

RunConfig build_run_config(const IniDocument& doc) {
  const Reader rd(doc);
  RunConfig rc;

  rc.species = rd.text("atom", "species", "Rb87");
  if (rc.species == "Rb87") {
    rc.trap.atom = AtomSpecies::rubidium87();
  } else if (rc.species == "custom") {
    for (const char* k : {"mass_kg", "g_F", "m_F"})
      if (!rd.has("atom", k)) rd.fail("atom", "species", fmt::format("custom species requires '{}'", k));
    rc.trap.atom.label = "custom";
  } else {
    rd.fail("atom", "species", fmt::format("unknown species '{}' (use Rb87 or custom)", rc.species));
  }
  rc.trap.atom.mass = rd.positive("atom", "mass_kg", rc.trap.atom.mass);
  rc.trap.atom.g_F = rd.positive("atom", "g_F", rc.trap.atom.g_F);
  const long long m_f = rd.integer("atom", "m_F", rc.trap.atom.m_F);
  if (m_f < 1 || m_f > 16) rd.fail("atom", "m_F", fmt::format("must be in 1..16, got {}", m_f));
  rc.trap.atom.m_F = static_cast<int>(m_f);

  rc.trap.quad.gradient =
      convert_units(rd.positive("quadrupole", "gradient_G_per_cm", 100.0), Unit::GaussPerCm, Unit::TeslaPerMeter);

  auto& rf = rc.trap.rf;
  rf.b_x = convert_units(rd.non_negative("rf", "bx_G", 0.0), Unit::Gauss, Unit::Tesla);
  rf.b_y = convert_units(rd.non_negative("rf", "by_G", 0.0), Unit::Gauss, Unit::Tesla);
  rf.b_z = convert_units(rd.non_negative("rf", "bz_G", 0.0), Unit::Gauss, Unit::Tesla);
  rf.alpha = convert_units(rd.real("rf", "alpha_deg", 0.0), Unit::Degree, Unit::Radian);
  rf.beta = convert_units(rd.real("rf", "beta_deg", 0.0), Unit::Degree, Unit::Radian);
  rf.omega = convert_units(rd.positive("rf", "freq_MHz", 1.5), Unit::MHz, Unit::RadPerSecond);
  rf.normalize();
  rc.trap.gravity_on = rd.boolean("gravity", "enabled", false);
  try {
    rc.trap.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }

  const double r0 = resonance_radius(rc.trap);
  const double r0_um = r0 / units::micrometer;
  auto um = [&](const char* key, double fallback_um) { return rd.real("analysis", key, fallback_um) * units::micrometer; };
  const double span_um = 2.5 * r0_um;
  rc.region.lo = Vec3(um("x_min_um", -span_um), um("y_min_um", -span_um), um("z_min_um", 0.0));
  rc.region.hi = Vec3(um("x_max_um", span_um), um("y_max_um", span_um), um("z_max_um", 0.0));
  const long long nx = rd.integer("analysis", "nx", 201), ny = rd.integer("analysis", "ny", 201),
                  nz = rd.integer("analysis", "nz", 1);
  for (auto [k, v] : {std::pair{"nx", nx}, {"ny", ny}, {"nz", nz}})
    if (v < 1) rd.fail("analysis", k, "must be >= 1");
  rc.dims = {static_cast<std::size_t>(nx), static_cast<std::size_t>(ny), static_cast<std::size_t>(nz)};
  const char* axis_keys[3][2] = {{"x_min_um", "x_max_um"}, {"y_min_um", "y_max_um"}, {"z_min_um", "z_max_um"}};
  for (int a = 0; a < 3; ++a) {
    if (rc.region.hi[a] < rc.region.lo[a]) rd.fail("analysis", axis_keys[a][1], "must be >= the matching _min");
    if (rc.dims[a] > 1 && !(rc.region.hi[a] > rc.region.lo[a]))
      rd.fail("analysis", axis_keys[a][1], "axis has more than one node but zero extent");
  }

  auto& an = rc.analysis;
  const long long n_phi = rd.integer("analysis", "n_phi", 64);
  if (n_phi < 64) rd.fail("analysis", "n_phi", "must be >= 64 for classification");
  an.n_phi = static_cast<int>(n_phi);
  an.tolerances.rel_tol = rd.positive("analysis", "rel_tol", 1e-3);
  an.tolerances.match_tol = rd.positive("analysis", "match_tol", 1e-2);
  an.gravity_threshold = rd.positive("analysis", "gravity_threshold", 5.0);
  const std::string valley = rd.text("analysis", "valley", "half-plane");
  if (valley == "half-plane") {
    an.profile.domain = ValleyDomain::HalfPlane;
  } else if (valley == "mid-plane") {
    an.profile.domain = ValleyDomain::MidPlane;
  } else {
    rd.fail("analysis", "valley", fmt::format("'{}' is not half-plane or mid-plane", valley));
  }
  an.minimum.fd_step = rd.positive("analysis", "fd_step_um", kDefaultFdStep / units::micrometer) * units::micrometer;
  if (an.minimum.fd_step < kMinFdStep) rd.fail("analysis", "fd_step_um", "below the 1e-3 um floor");

  auto& im = rc.imaging;
  im.temperature = convert_units(rd.positive("imaging", "temperature_uK", 20.0), Unit::MicroKelvin, Unit::Joule) /
                   PhysicalConstants::k_B;
  im.atom_number = rd.non_negative("imaging", "atom_number", 1e5);
  im.pixel_size = rd.positive("imaging", "pixel_um", 2.5) * units::micrometer;
  im.half_width = rd.positive("imaging", "half_width_um", 2.0 * r0_um) * units::micrometer;
  im.depth_half = rd.positive("imaging", "depth_half_um", 1.0 * r0_um) * units::micrometer;
  const long long depth_nodes = rd.integer("imaging", "depth_nodes", 161);
  if (depth_nodes < 2) rd.fail("imaging", "depth_nodes", "must be >= 2");
  im.depth_nodes = static_cast<std::size_t>(depth_nodes);
  im.cross_section = rd.positive("imaging", "cross_section", 1.0);
  im.noise_rel = rd.non_negative("imaging", "noise_rel", 0.0);
  const long long seed = rd.integer("imaging", "noise_seed", 1);
  if (seed < 0) rd.fail("imaging", "noise_seed", "must be >= 0");
  im.noise_seed = static_cast<std::uint64_t>(seed);
  const long long n_diam = rd.integer("imaging", "n_diameters", 16);
  if (n_diam < 2) rd.fail("imaging", "n_diameters", "must be >= 2");
  im.n_diameters = static_cast<int>(n_diam);
  const std::string axis = rd.text("imaging", "axis", "z");
  if (axis == "x") im.axis = Axis::X;
  else if (axis == "y") im.axis = Axis::Y;
  else if (axis == "z") im.axis = Axis::Z;
  else rd.fail("imaging", "axis", fmt::format("'{}' is not x, y or z", axis));

  auto& sw = rc.sweep;
  std::vector<double> mhz = rd.list("sweep", "freqs_MHz");
  const bool has_range = rd.has("sweep", "start_MHz") || rd.has("sweep", "stop_MHz") || rd.has("sweep", "steps");
  if (!mhz.empty() && has_range) rd.fail("sweep", "freqs_MHz", "give either freqs_MHz or start/stop/steps, not both");
  if (has_range) {
    const double a = rd.positive("sweep", "start_MHz", 0.5), b = rd.positive("sweep", "stop_MHz", 3.0);
    const long long steps = rd.integer("sweep", "steps", 26);
    if (steps < 1) rd.fail("sweep", "steps", "must be >= 1");
    for (long long k = 0; k < steps; ++k)
      mhz.push_back(steps == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(steps - 1));
  }
  for (double f : mhz)
    if (!(f > 0.0)) rd.fail("sweep", "freqs_MHz", fmt::format("frequencies must be positive, got {}", f));
  sw.amplitude_table = rd.text("sweep", "amplitude_table", "");
  if (!sw.amplitude_table.empty()) {
    const auto table = read_amplitude_table(sw.amplitude_table);
    if (mhz.empty())
      for (const auto& row : table) mhz.push_back(row.first);
    for (double f : mhz) {
      const auto it = std::find_if(table.begin(), table.end(),
                                   [&](const auto& row) { return std::abs(row.first - f) <= 1e-9 * f; });
      if (it == table.end()) rd.fail("sweep", "amplitude_table", fmt::format("no row for {} MHz", f));
      sw.amplitudes.push_back(it->second);
    }
  }
  if (mhz.empty()) mhz.push_back(convert_units(rf.omega, Unit::RadPerSecond, Unit::MHz));
  for (double f : mhz) sw.omegas.push_back(convert_units(f, Unit::MHz, Unit::RadPerSecond));

  rc.output.directory = rd.text("output", "directory", "out");
  const std::string formats = rd.text("output", "formats", "csv,bin");
  rc.output.csv = rc.output.binary = false;
  std::string_view rest(formats);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string f = trim(rest.substr(0, comma));
    if (f == "csv") rc.output.csv = true;
    else if (f == "bin") rc.output.binary = true;
    else rd.fail("output", "formats", fmt::format("unknown format '{}' (csv, bin)", f));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return rc;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError(fmt::format("cannot read config '{}'", path));
  std::stringstream ss;
  ss << is.rdbuf();
  IniDocument doc = IniDocument::parse(ss.str(), path);
  for (const auto& o : overrides) doc.set_override(o);
  return build_run_config(doc);
}

std::string resolved_config_text(const RunConfig& rc) {
  const auto& t = rc.trap;
  auto g = [](double tesla) { return convert_units(tesla, Unit::Tesla, Unit::Gauss); };
  auto um = [](double m) { return m / units::micrometer; };
  std::string s;
  auto out = std::back_inserter(s);
  fmt::format_to(out, "# resolved configuration (all defaults materialized)\n");
  fmt::format_to(out, "[atom]\nspecies = {}\nmass_kg = {}\ng_F = {}\nm_F = {}\n\n", rc.species, t.atom.mass, t.atom.g_F,
                 t.atom.m_F);
  fmt::format_to(out, "[quadrupole]\ngradient_G_per_cm = {}\n\n",
                 convert_units(t.quad.gradient, Unit::TeslaPerMeter, Unit::GaussPerCm));
  fmt::format_to(out, "[rf]\nbx_G = {}\nby_G = {}\nbz_G = {}\nalpha_deg = {}\nbeta_deg = {}\nfreq_MHz = {}\n\n",
                 g(t.rf.b_x), g(t.rf.b_y), g(t.rf.b_z), convert_units(t.rf.alpha, Unit::Radian, Unit::Degree),
                 convert_units(t.rf.beta, Unit::Radian, Unit::Degree),
                 convert_units(t.rf.omega, Unit::RadPerSecond, Unit::MHz));
  fmt::format_to(out, "[gravity]\nenabled = {}\n\n", t.gravity_on);
  const auto& an = rc.analysis;
  fmt::format_to(out,
                 "[analysis]\nx_min_um = {}\nx_max_um = {}\ny_min_um = {}\ny_max_um = {}\nz_min_um = {}\n"
                 "z_max_um = {}\nnx = {}\nny = {}\nnz = {}\nn_phi = {}\nrel_tol = {}\nmatch_tol = {}\n"
                 "gravity_threshold = {}\nvalley = {}\nfd_step_um = {}\n\n",
                 um(rc.region.lo.x()), um(rc.region.hi.x()), um(rc.region.lo.y()), um(rc.region.hi.y()),
                 um(rc.region.lo.z()), um(rc.region.hi.z()), rc.dims[0], rc.dims[1], rc.dims[2], an.n_phi,
                 an.tolerances.rel_tol, an.tolerances.match_tol, an.gravity_threshold,
                 an.profile.domain == ValleyDomain::HalfPlane ? "half-plane" : "mid-plane",
                 um(an.minimum.fd_step));
  const auto& im = rc.imaging;
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  fmt::format_to(out,
                 "[imaging]\ntemperature_uK = {}\natom_number = {}\npixel_um = {}\nhalf_width_um = {}\n"
                 "depth_half_um = {}\ndepth_nodes = {}\ncross_section = {}\nnoise_rel = {}\nnoise_seed = {}\n"
                 "n_diameters = {}\naxis = {}\n\n",
                 convert_units(im.temperature * PhysicalConstants::k_B, Unit::Joule, Unit::MicroKelvin),
                 im.atom_number, um(im.pixel_size), um(im.half_width), um(im.depth_half), im.depth_nodes,
                 im.cross_section, im.noise_rel, im.noise_seed, im.n_diameters, kAxes[static_cast<int>(im.axis)]);
  std::string freqs;
  for (std::size_t i = 0; i < rc.sweep.omegas.size(); ++i)
    freqs += fmt::format("{}{}", i ? "," : "", convert_units(rc.sweep.omegas[i], Unit::RadPerSecond, Unit::MHz));
  fmt::format_to(out, "[sweep]\nfreqs_MHz = {}\n", freqs);
  if (!rc.sweep.amplitude_table.empty()) fmt::format_to(out, "amplitude_table = {}\n", rc.sweep.amplitude_table);
  std::string formats;
  if (rc.output.csv) formats = "csv";
  if (rc.output.binary) formats += formats.empty() ? "bin" : ",bin";
  fmt::format_to(out, "\n[output]\ndirectory = {}\nformats = {}\n", rc.output.directory, formats);
  return s;
}

}  // namespace rfdress
