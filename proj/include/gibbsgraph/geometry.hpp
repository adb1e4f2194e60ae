#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "gibbsgraph/rng.hpp"

namespace gibbsgraph {

enum class Boundary { open, periodic };

/// A point of R^d. Coordinates are stored inline for d <= 4.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Point(std::span<const double> coords) : coords_(coords.begin(), coords.end()) {}
  explicit Point(std::size_t dim) : coords_(dim, 0.0) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }
  double& operator[](std::size_t i) noexcept { return coords_[i]; }
  std::span<const double> coords() const noexcept { return {coords_.data(), coords_.size()}; }

  friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }

 private:
  boost::container::small_vector<double, 4> coords_;
};

/// Axis-aligned box [0, L_1] x ... x [0, L_d], optionally with periodic wrap.
class Region {
 public:
  /// Throws std::invalid_argument unless every side is finite and positive.
  explicit Region(std::vector<double> sides, Boundary boundary = Boundary::open);

  std::size_t dim() const noexcept { return sides_.size(); }
  double side(std::size_t i) const noexcept { return sides_[i]; }
  const std::vector<double>& sides() const noexcept { return sides_; }
  Boundary boundary() const noexcept { return boundary_; }
  bool periodic() const noexcept { return boundary_ == Boundary::periodic; }

  double volume() const noexcept;
  bool contains(const Point& p) const noexcept;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<double> sides_;
  Boundary boundary_;
};

/// Sub-box [lower, upper] of a region, given in the region's coordinates.
struct Box {
  Point lower;
  Point upper;

  double volume() const noexcept;
  bool contains(const Point& p) const noexcept;
};

double volume(const Region& region) noexcept;

/// Euclidean distance; for periodic regions each axis uses the shorter way
/// around. Throws std::invalid_argument on dimension mismatch.
double distance(const Region& region, const Point& p, const Point& q);

/// Squared distance without dimension checks, for inner loops.
double squared_distance_unchecked(const Region& region, const Point& p, const Point& q) noexcept;

Point sample_uniform(const Region& region, Rng& rng);

/// True when `box` is non-degenerate-or-empty and lies inside `region`.
bool box_within(const Region& region, const Box& box) noexcept;

}  // namespace gibbsgraph
