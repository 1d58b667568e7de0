#include "rfdress/imaging.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rfdress {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw std::ios_base::failure(fmt::format("cannot open '{}' for writing", path));
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw std::ios_base::failure(fmt::format("cannot open '{}' for reading", path));
  return is;
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw std::ios_base::failure(fmt::format("{}: cannot parse '{}' as a number", where, s));
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

SyntheticImage from_header(const ImageHeader& h) {
  SyntheticImage img;
  img.nx = h.nx;
  img.ny = h.ny;
  img.pixel_size = h.pixel_size;
  img.origin_u = h.origin_u;
  img.origin_v = h.origin_v;
  img.axis_labels = h.axis_labels;
  img.units = h.units;
  return img;
}

}  // namespace

double u16_scale(const SyntheticImage& image) {
  double vmax = 0.0;
  for (double v : image.values) vmax = std::max(vmax, v);
  return vmax > 0.0 ? vmax / 65535.0 : 1.0;
}

void write_image_csv(const std::string& path, const SyntheticImage& image) {
  auto os = open_out(path);
  fmt::memory_buffer buf;
  for (std::size_t j = 0; j < image.ny; ++j) {
    for (std::size_t i = 0; i < image.nx; ++i) {
      if (i) buf.push_back(',');
      fmt::format_to(std::back_inserter(buf), "{}", image.at(i, j));
    }
    buf.push_back('\n');
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw std::ios_base::failure(fmt::format("write to '{}' failed", path));
}

void write_image_u16(const std::string& path, const SyntheticImage& image) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  const double scale = u16_scale(image);
  std::vector<unsigned char> bytes;
  bytes.reserve(image.values.size() * 2);
  for (double v : image.values) {
    const double code = std::clamp(std::round(v / scale), 0.0, 65535.0);
    const auto c = static_cast<std::uint16_t>(code);
    bytes.push_back(static_cast<unsigned char>(c & 0xff));
    bytes.push_back(static_cast<unsigned char>(c >> 8));
  }
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::ios_base::failure(fmt::format("write to '{}' failed", path));
}

void write_image_header(const std::string& path, const SyntheticImage& image) {
  auto os = open_out(path);
  os << fmt::format(
      "# synthetic absorption image\n"
      "nx = {}\nny = {}\npixel_size_m = {}\norigin_u_m = {}\norigin_v_m = {}\n"
      "axis_u = {}\naxis_v = {}\nunits = {}\n"
      "u16_scale = {}\nu16_layout = little-endian uint16, row-major, u fastest\n"
      "csv_layout = one row per v index, u along columns\n",
      image.nx, image.ny, image.pixel_size, image.origin_u, image.origin_v, image.axis_labels[0],
      image.axis_labels[1], image.units, u16_scale(image));
  if (!os) throw std::ios_base::failure(fmt::format("write to '{}' failed", path));
}

ImageHeader read_image_header(const std::string& path) {
  auto is = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::ios_base::failure(fmt::format("{}: malformed line '{}'", path, t));
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  auto need = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::ios_base::failure(fmt::format("{}: missing '{}'", path, key));
    return it->second;
  };
  ImageHeader h;
  h.nx = static_cast<std::size_t>(parse_double(need("nx"), path));
  h.ny = static_cast<std::size_t>(parse_double(need("ny"), path));
  h.pixel_size = parse_double(need("pixel_size_m"), path);
  h.origin_u = parse_double(need("origin_u_m"), path);
  h.origin_v = parse_double(need("origin_v_m"), path);
  h.scale = parse_double(need("u16_scale"), path);
  h.axis_labels = {need("axis_u"), need("axis_v")};
  h.units = need("units");
  return h;
}

SyntheticImage read_image_csv(const std::string& path, const ImageHeader& header) {
  auto is = open_in(path);
  SyntheticImage img = from_header(header);
  img.values.reserve(img.nx * img.ny);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::size_t cols = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      img.values.push_back(parse_double(trim(rest.substr(0, comma)), path));
      ++cols;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols != img.nx)
      throw std::ios_base::failure(fmt::format("{}: row {} has {} columns, expected {}", path, rows + 1, cols, img.nx));
    ++rows;
  }
  if (rows != img.ny) throw std::ios_base::failure(fmt::format("{}: {} rows, expected {}", path, rows, img.ny));
  return img;
}

SyntheticImage read_image_u16(const std::string& path, const ImageHeader& header) {
  auto is = open_in(path, std::ios::in | std::ios::binary);
  SyntheticImage img = from_header(header);
  const std::size_t n = img.nx * img.ny;
  std::vector<unsigned char> bytes(n * 2);
  is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(is.gcount()) != bytes.size() || is.peek() != std::char_traits<char>::eof())
    throw std::ios_base::failure(fmt::format("{}: expected exactly {} bytes", path, bytes.size()));
  img.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto code = static_cast<std::uint16_t>(bytes[2 * k] | (bytes[2 * k + 1] << 8));
    img.values[k] = code * header.scale;
  }
  return img;
}

}  // namespace rfdress
