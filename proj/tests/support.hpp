#pragma once

#include <cmath>
#include <memory>
#include <numbers>

#include "plc/field.hpp"
#include "plc/geometry.hpp"

namespace plc::test {

inline constexpr double pi = std::numbers::pi;

inline std::shared_ptr<const GridMask> grid(const ConvexDomain& domain, double h) {
  return std::make_shared<const GridMask>(rasterize(domain, h));
}

inline ConvexDomain unit_square() { return ConvexDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }
inline ConvexDomain unit_disc() { return ConvexDomain::disc({0, 0}, 1.0); }
inline ConvexDomain unit_interval() { return ConvexDomain::interval(0.0, 1.0); }

/// sin(pi x) on (0, 1).
inline GridField sine_1d(double h) {
  return sample(grid(unit_interval(), h), [](Point p) { return std::sin(pi * p.x); });
}

/// sin(pi x) sin(pi y) on the unit square.
inline GridField sine_2d(double h) {
  return sample(grid(unit_square(), h),
                [](Point p) { return std::sin(pi * p.x) * std::sin(pi * p.y); });
}

}  // namespace plc::test
