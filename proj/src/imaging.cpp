#include "rfdress/imaging.hpp"

#include "rfdress/analysis.hpp"
#include "rfdress/dressed.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace rfdress {

namespace {

using PC = PhysicalConstants;

double trapezoid_weight(std::size_t i, std::size_t n) {
  if (n == 1) return 1.0;
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

}  // namespace

double SyntheticImage::integral() const {
  double sum = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) sum += trapezoid_weight(i, nx) * trapezoid_weight(j, ny) * at(i, j);
  return sum * pixel_size * pixel_size;
}

double SyntheticImage::sample(double pi, double pj) const {
  if (nx == 0 || ny == 0) return 0.0;
  const double max_i = static_cast<double>(nx - 1), max_j = static_cast<double>(ny - 1);
  if (pi < 0.0 || pj < 0.0 || pi > max_i || pj > max_j) return 0.0;
  const auto i0 = static_cast<std::size_t>(std::min(std::floor(pi), std::max(0.0, max_i - 1.0)));
  const auto j0 = static_cast<std::size_t>(std::min(std::floor(pj), std::max(0.0, max_j - 1.0)));
  const std::size_t i1 = std::min(i0 + 1, nx - 1), j1 = std::min(j0 + 1, ny - 1);
  const double fx = pi - static_cast<double>(i0), fy = pj - static_cast<double>(j0);
  return (1 - fx) * (1 - fy) * at(i0, j0) + fx * (1 - fy) * at(i1, j0) + (1 - fx) * fy * at(i0, j1) +
         fx * fy * at(i1, j1);
}

ScalarGrid thermal_density(const TrapConfig& cfg, double temperature, const Box& region, const Dims& dims,
                           double atom_number) {
  if (!(temperature > 0.0)) throw std::invalid_argument(fmt::format("temperature must be positive, got {} K", temperature));
  if (!(atom_number >= 0.0)) throw std::invalid_argument("atom number must be >= 0");
  ScalarGrid grid = sample_grid(cfg, region, dims);
  auto& v = grid.values();
  const double v_min = *std::min_element(v.begin(), v.end());
  if (!std::isfinite(v_min)) throw std::runtime_error("thermal_density: potential minimum not found on the grid");

  const double kt = PC::k_B * temperature;
  const auto& d = grid.dims();
  double total = 0.0;
  for (std::size_t k = 0; k < d[2]; ++k)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t i = 0; i < d[0]; ++i) {
        double& n = grid.at(i, j, k);
        n = std::exp(-(n - v_min) / kt);
        total += trapezoid_weight(i, d[0]) * trapezoid_weight(j, d[1]) * trapezoid_weight(k, d[2]) * n;
      }
  double cell = 1.0;
  for (int a = 0; a < 3; ++a)
    if (d[a] > 1) cell *= grid.spacing()[a];
  const double norm = atom_number / (total * cell);
  for (double& n : v) n *= norm;
  ScalarGrid out(grid.origin(), grid.spacing(), grid.dims(), "m^-3");
  out.values() = std::move(v);
  return out;
}

SyntheticImage column_density(const ScalarGrid& density, Axis axis) {
  const int ax = static_cast<int>(axis);
  const int ua = ax == 0 ? 1 : 0;
  const int va = ax == 2 ? 1 : 2;
  const auto& d = density.dims();
  const auto& sp = density.spacing();
  if (std::abs(sp[ua] - sp[va]) > 1e-12 * std::max(sp[ua], sp[va]) && d[ua] > 1 && d[va] > 1)
    throw std::invalid_argument("column_density: image pixels must be square");

  static constexpr const char* kNames[] = {"x", "y", "z"};
  SyntheticImage img;
  img.nx = d[ua];
  img.ny = d[va];
  img.pixel_size = d[ua] > 1 ? sp[ua] : sp[va];
  img.origin_u = density.origin()[ua];
  img.origin_v = density.origin()[va];
  img.axis_labels = {kNames[ua], kNames[va]};
  img.units = "atoms/m^2";
  img.values.assign(img.nx * img.ny, 0.0);

  const double dl = d[ax] > 1 ? sp[ax] : 1.0;
  std::array<std::size_t, 3> idx{};
  for (std::size_t j = 0; j < img.ny; ++j) {
    for (std::size_t i = 0; i < img.nx; ++i) {
      double sum = 0.0;
      for (std::size_t l = 0; l < d[ax]; ++l) {
        idx[ua] = i;
        idx[va] = j;
        idx[ax] = l;
        sum += trapezoid_weight(l, d[ax]) * density.at(idx[0], idx[1], idx[2]);
      }
      img.values[i + img.nx * j] = sum * dl;
    }
  }
  return img;
}

SyntheticImage optical_density(SyntheticImage image, double cross_section) {
  if (!(cross_section > 0.0)) throw std::invalid_argument("cross section must be positive");
  for (double& v : image.values) v *= cross_section;
  image.units = "optical density (a.u.)";
  return image;
}

void add_gaussian_noise(SyntheticImage& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : image.values) v = std::max(0.0, v + noise(rng));
}

// ---------------------------------------------------------------------------

namespace {

using Params = Eigen::Matrix<double, 6, 1>;

double gauss(double t, double a, double c, double s) {
  const double u = (t - c) / s;
  return a * std::exp(-0.5 * u * u);
}

double cost_of(const Params& p, const Eigen::VectorXd& t, const Eigen::VectorXd& y, Eigen::VectorXd* r) {
  Eigen::VectorXd res(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i)
    res[i] = gauss(t[i], p[0], p[1], p[2]) + gauss(t[i], p[3], p[4], p[5]) - y[i];
  if (r) *r = res;
  return 0.5 * res.squaredNorm();
}

Eigen::MatrixXd jacobian(const Params& p, const Eigen::VectorXd& t) {
  Eigen::MatrixXd j(t.size(), 6);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    for (int g = 0; g < 2; ++g) {
      const double a = p[3 * g], c = p[3 * g + 1], s = p[3 * g + 2];
      const double u = (t[i] - c) / s;
      const double e = std::exp(-0.5 * u * u);
      j(i, 3 * g) = e;
      j(i, 3 * g + 1) = a * e * u / s;
      j(i, 3 * g + 2) = a * e * u * u / s;
    }
  }
  return j;
}

}  // namespace

TwoGaussianFit fit_two_gaussians(std::span<const double> positions, std::span<const double> values) {
  const std::size_t n = positions.size();
  if (n != values.size()) throw MeasurementError("profile positions and values differ in length");
  if (n < 12) throw MeasurementError(fmt::format("two-Gaussian fit needs >= 12 samples, got {}", n));
  const auto [vmin_it, vmax_it] = std::minmax_element(values.begin(), values.end());
  const double vmax = *vmax_it;
  if (!(vmax > *vmin_it) || !(vmax > 0.0)) throw MeasurementError("profile is constant or non-positive");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(positions[i]) || !std::isfinite(values[i])) throw MeasurementError("non-finite profile sample");

  // Work in sample-spacing units centred on the profile midpoint, values scaled to max 1.
  const double t_mid = 0.5 * (positions.front() + positions.back());
  const double spacing = std::abs(positions.back() - positions.front()) / static_cast<double>(n - 1);
  if (!(spacing > 0.0)) throw MeasurementError("profile positions are degenerate");
  Eigen::VectorXd t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = (positions[i] - t_mid) / spacing;
    y[i] = values[i] / vmax;
  }

  double wsum = 0.0, tsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::max(0.0, y[i]);
    wsum += w;
    tsum += w * t[i];
  }
  const double centroid = tsum / wsum;

  auto side_peak = [&](bool left) -> std::ptrdiff_t {
    std::ptrdiff_t best_local = -1, best_any = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if ((t[i] < centroid) != left) continue;
      if (best_any < 0 || y[i] > y[best_any]) best_any = static_cast<std::ptrdiff_t>(i);
      const bool local = i > 0 && i + 1 < n && y[i] >= y[i - 1] && y[i] >= y[i + 1];
      if (local && (best_local < 0 || y[i] > y[best_local])) best_local = static_cast<std::ptrdiff_t>(i);
    }
    return best_local >= 0 ? best_local : best_any;
  };
  const std::ptrdiff_t il = side_peak(true), ir = side_peak(false);
  if (il < 0 || ir < 0) throw MeasurementError("profile has samples on only one side of its centroid");

  Params p;
  const double sep = std::max(1.0, t[ir] - t[il]);
  p << y[il], t[il], 0.25 * sep, y[ir], t[ir], 0.25 * sep;

  TwoGaussianFit fit;
  Eigen::VectorXd r;
  double cost = cost_of(p, t, y, &r);
  double lambda = 1e-3;
  for (int it = 0; it < 200; ++it) {
    fit.iterations = it + 1;
    if (cost == 0.0) break;
    const Eigen::MatrixXd jac = jacobian(p, t);
    const Eigen::Matrix<double, 6, 6> a = jac.transpose() * jac;
    const Params g = jac.transpose() * r;

    bool accepted = false, solved_any = false;
    double new_cost = cost;
    Params trial;
    for (int attempt = 0; attempt <= 8; ++attempt) {
      Eigen::Matrix<double, 6, 6> m = a;
      for (int k = 0; k < 6; ++k) m(k, k) += lambda * std::max(a(k, k), 1e-12);
      Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(m);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        lambda *= 10.0;
        continue;
      }
      solved_any = true;
      trial = p - ldlt.solve(g);
      if (!trial.allFinite() || trial[2] <= 0.0 || trial[5] <= 0.0) {
        lambda *= 10.0;
        continue;
      }
      new_cost = cost_of(trial, t, y, nullptr);
      if (new_cost < cost) {
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!solved_any) throw MeasurementError("two-Gaussian fit: normal equations singular after 8 damping increases");
    if (!accepted) break;  // no descent left at any damping: converged
    const double rel = (cost - new_cost) / cost;
    p = trial;
    cost = cost_of(p, t, y, &r);
    lambda = std::max(lambda / 10.0, 1e-12);
    if (rel < 1e-10) break;
  }
  if (!p.allFinite()) throw MeasurementError("two-Gaussian fit diverged");

  if (p[1] > p[4]) {
    std::swap(p[0], p[3]);
    std::swap(p[1], p[4]);
    std::swap(p[2], p[5]);
  }
  fit.degenerate = std::abs(p[4] - p[1]) < 1.0;
  fit.amplitude1 = p[0] * vmax;
  fit.center1 = t_mid + p[1] * spacing;
  fit.width1 = p[2] * spacing;
  fit.amplitude2 = p[3] * vmax;
  fit.center2 = t_mid + p[4] * spacing;
  fit.width2 = p[5] * spacing;
  fit.residual = std::sqrt(2.0 * cost / static_cast<double>(n)) * vmax;
  return fit;
}

RadiusMeasurement measure_ring_radius(const SyntheticImage& image, int n_diameters) {
  if (n_diameters < 2) throw std::invalid_argument(fmt::format("need >= 2 diameters, got {}", n_diameters));
  if (image.nx < 2 || image.ny < 2) throw MeasurementError("image too small");

  double total = 0.0, su = 0.0, sv = 0.0;
  for (std::size_t j = 0; j < image.ny; ++j)
    for (std::size_t i = 0; i < image.nx; ++i) {
      const double w = image.at(i, j);
      total += w;
      su += w * static_cast<double>(i);
      sv += w * static_cast<double>(j);
    }
  if (!(total > 0.0)) throw MeasurementError("image is empty; no centroid");
  const double ci = su / total, cj = sv / total;

  RadiusMeasurement out;
  out.center_u = image.origin_u + ci * image.pixel_size;
  out.center_v = image.origin_v + cj * image.pixel_size;

  const double max_i = static_cast<double>(image.nx - 1), max_j = static_cast<double>(image.ny - 1);
  auto reach = [](double c, double dir, double hi) {
    if (std::abs(dir) < 1e-15) return std::numeric_limits<double>::infinity();
    return dir > 0 ? (hi - c) / dir : -c / dir;
  };

  std::vector<double> radii;
  for (int k = 0; k < n_diameters; ++k) {
    DiameterFit df;
    df.angle = std::numbers::pi * k / n_diameters;
    const double di = std::cos(df.angle), dj = std::sin(df.angle);
    const double t_max = std::min({reach(ci, di, max_i), reach(ci, -di, max_i), reach(cj, dj, max_j),
                                   reach(cj, -dj, max_j)});
    const auto half = static_cast<int>(std::floor(t_max));
    std::vector<double> pos, val;
    for (int s = -half; s <= half; ++s) {
      pos.push_back(s * image.pixel_size);
      val.push_back(image.sample(ci + s * di, cj + s * dj));
    }
    try {
      const TwoGaussianFit fit = fit_two_gaussians(pos, val);
      df.residual = fit.residual;
      if (fit.degenerate) {
        df.note = "degenerate: the two centers collapsed";
      } else if (!(fit.center1 < 0.0 && fit.center2 > 0.0)) {
        df.note = "both peaks on one side of the centroid";
      } else {
        df.radius = 0.5 * (fit.center2 - fit.center1);
        df.ok = true;
        radii.push_back(df.radius);
      }
    } catch (const MeasurementError& e) {
      df.note = e.what();
    }
    out.per_diameter.push_back(std::move(df));
  }
  if (radii.empty()) throw MeasurementError("ring radius: every diameter fit failed");
  const double mean = std::accumulate(radii.begin(), radii.end(), 0.0) / static_cast<double>(radii.size());
  double var = 0.0;
  for (double r : radii) var += (r - mean) * (r - mean);
  out.radius = mean;
  out.uncertainty = radii.size() > 1 ? std::sqrt(var / static_cast<double>(radii.size() - 1)) : 0.0;
  return out;
}

}  // namespace rfdress
