#include "gibbsgraph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gibbsgraph {

Region::Region(std::vector<double> sides, Boundary boundary)
    : sides_(std::move(sides)), boundary_(boundary) {
  if (sides_.empty()) throw std::invalid_argument("region must have dimension >= 1");
  for (double s : sides_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("region side lengths must be finite and positive, got " +
                                  std::to_string(s));
    }
  }
}

double Region::volume() const noexcept {
  double v = 1.0;
  for (double s : sides_) v *= s;
  return v;
}

bool Region::contains(const Point& p) const noexcept {
  if (p.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= sides_[i])) return false;
  }
  return true;
}

double Box::volume() const noexcept {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.dim(); ++i) v *= std::max(0.0, upper[i] - lower[i]);
  return v;
}

bool Box::contains(const Point& p) const noexcept {
  for (std::size_t i = 0; i < lower.dim(); ++i) {
    if (p[i] < lower[i] || p[i] > upper[i]) return false;
  }
  return true;
}

double volume(const Region& region) noexcept { return region.volume(); }

double squared_distance_unchecked(const Region& region, const Point& p, const Point& q) noexcept {
  double acc = 0.0;
  const std::size_t d = p.dim();
  if (region.periodic()) {
    for (std::size_t i = 0; i < d; ++i) {
      double delta = std::abs(p[i] - q[i]);
      delta = std::min(delta, region.side(i) - delta);
      acc += delta * delta;
    }
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      const double delta = p[i] - q[i];
      acc += delta * delta;
    }
  }
  return acc;
}

double distance(const Region& region, const Point& p, const Point& q) {
  if (p.dim() != region.dim() || q.dim() != region.dim()) {
    throw std::invalid_argument("point dimension does not match region dimension");
  }
  return std::sqrt(squared_distance_unchecked(region, p, q));
}

Point sample_uniform(const Region& region, Rng& rng) {
  Point p(region.dim());
  for (std::size_t i = 0; i < region.dim(); ++i) p[i] = uniform01(rng) * region.side(i);
  return p;
}

bool box_within(const Region& region, const Box& box) noexcept {
  if (box.lower.dim() != region.dim() || box.upper.dim() != region.dim()) return false;
  for (std::size_t i = 0; i < region.dim(); ++i) {
    if (box.lower[i] < 0.0 || box.upper[i] > region.side(i) || box.lower[i] > box.upper[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace gibbsgraph
