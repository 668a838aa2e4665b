#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace plc::hull {

/// A sample lifted above the integer lattice: (x, y) are grid indices and z
/// the sampled value. Integer abscissae keep every planar predicate exact.
struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  double z = 0.0;
};

/// Exact sign of sum_i coeff[i] * z[i]. Coefficients must satisfy |c| < 2^53.
int sign_of_sum(std::span<const std::int64_t> coeff, std::span<const double> z);

/// Exact sign of the planar orientation of (a, b, c); positive when
/// counter-clockwise.
int orient2d(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c);

/// Sign of (d - a) . ((b - a) x (c - a)) for points of `pts` after a
/// symbolic perturbation that favours lower indices. Never zero.
int orient3d(std::span<const LatticePoint> pts, int a, int b, int c, int d);

/// Downward-facing facets of the convex hull of the lifted points, as
/// counter-clockwise (in the plane) index triples of positive area. Built by
/// randomized incremental insertion with a conflict graph; the insertion
/// order is derived from `seed`, so the output is deterministic.
std::vector<std::array<int, 3>> lower_hull_2d(std::span<const LatticePoint> pts,
                                              std::uint64_t seed = 0x9e3779b97f4a7c15ull);

/// Vertices of the lower hull of (x[i], z[i]) for strictly increasing x,
/// monotone chain. Points on a chord are dropped.
std::vector<int> lower_hull_1d(std::span<const std::int64_t> x, std::span<const double> z);

}  // namespace plc::hull
