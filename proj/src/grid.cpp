#include "rfdress/grid.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfdress {

ScalarGrid::ScalarGrid(const Vec3& origin, const Vec3& spacing, const Dims& dims, std::string unit)
    : origin_(origin), spacing_(spacing), dims_(dims), unit_(std::move(unit)) {
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] == 0) throw std::invalid_argument("grid dims must be positive");
    if (!(spacing_[a] > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  }
  values_.assign(dims_[0] * dims_[1] * dims_[2], 0.0);
}

Vec3 ScalarGrid::position(std::size_t i, std::size_t j, std::size_t k) const {
  return origin_ + Vec3(static_cast<double>(i) * spacing_[0], static_cast<double>(j) * spacing_[1],
                        static_cast<double>(k) * spacing_[2]);
}

Vec3 ScalarGrid::position(std::size_t flat) const {
  const std::size_t i = flat % dims_[0];
  const std::size_t j = (flat / dims_[0]) % dims_[1];
  const std::size_t k = flat / (dims_[0] * dims_[1]);
  return position(i, j, k);
}

std::size_t ScalarGrid::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) - values_.begin());
}

std::size_t ScalarGrid::argmax() const {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

void ScalarGrid::check_finite() const {
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (!std::isfinite(values_[n]))
      throw std::runtime_error(fmt::format("non-finite grid value at node {}", n));
  }
}

Lattice make_lattice(const Box& region, const Dims& dims) {
  Lattice l;
  for (int a = 0; a < 3; ++a) {
    const double lo = region.lo[a], hi = region.hi[a];
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
      throw std::invalid_argument(fmt::format("region axis {} is empty ([{}, {}])", a, lo, hi));
    if (dims[a] == 0) throw std::invalid_argument("grid dims must be positive");
    if (dims[a] == 1) {
      l.origin[a] = 0.5 * (lo + hi);
      l.spacing[a] = 1.0;
    } else {
      if (!(hi > lo))
        throw std::invalid_argument(
            fmt::format("region axis {} has zero extent but {} nodes", a, dims[a]));
      l.origin[a] = lo;
      l.spacing[a] = (hi - lo) / static_cast<double>(dims[a] - 1);
    }
  }
  return l;
}

}  // namespace rfdress
