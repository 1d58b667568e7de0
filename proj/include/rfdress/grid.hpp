#pragma once

#include "rfdress/fields.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace rfdress {

/// Axis-aligned box [lo, hi]. An axis with lo == hi is allowed when the grid
/// collapses that axis (dims == 1).
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

using Dims = std::array<std::size_t, 3>;

/// Node-centred samples on a rectangular lattice. Index order is x fastest:
/// index = i + nx * (j + ny * k).
class ScalarGrid {
 public:
  ScalarGrid() = default;
  ScalarGrid(const Vec3& origin, const Vec3& spacing, const Dims& dims, std::string unit = "J");

  const Vec3& origin() const { return origin_; }
  const Vec3& spacing() const { return spacing_; }
  const Dims& dims() const { return dims_; }
  const std::string& unit() const { return unit_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims_[0] * (j + dims_[1] * k);
  }
  Vec3 position(std::size_t i, std::size_t j, std::size_t k) const;
  Vec3 position(std::size_t flat) const;

  double& at(std::size_t i, std::size_t j, std::size_t k) { return values_[index(i, j, k)]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values_[index(i, j, k)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t argmin() const;
  std::size_t argmax() const;

  /// Throws std::runtime_error when any value is not finite.
  void check_finite() const;

 private:
  Vec3 origin_ = Vec3::Zero();
  Vec3 spacing_ = Vec3::Ones();
  Dims dims_{1, 1, 1};
  std::string unit_ = "J";
  std::vector<double> values_;
};

/// Lattice geometry for a box: collapsed axes (dims == 1) sit at the box
/// midpoint with unit nominal spacing.
struct Lattice {
  Vec3 origin;
  Vec3 spacing;
};
Lattice make_lattice(const Box& region, const Dims& dims);

}  // namespace rfdress
