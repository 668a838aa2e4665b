#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "plc/error.hpp"
#include "plc/random.hpp"
#include "plc/verify.hpp"

namespace plc::detail {

inline std::vector<std::size_t> check_nodes(const GridMask& mask, double band, bool full_stencil) {
  std::vector<std::size_t> out;
  for (std::size_t k : banded_nodes(mask, band)) {
    if (!full_stencil || mask.full_stencil(k)) out.push_back(k);
  }
  if (out.empty()) throw GridTooCoarse("no grid node inside the check band");
  return out;
}

/// Ordered pair of distinct entries of `nodes`.
inline std::pair<std::size_t, std::size_t> draw_pair(Rng& rng, const std::vector<std::size_t>& nodes) {
  const std::size_t a = nodes[rng.index(nodes.size())];
  std::size_t b = nodes[rng.index(nodes.size())];
  while (b == a) b = nodes[rng.index(nodes.size())];
  return {a, b};
}

inline Point lerp(Point a, Point b, double t) {
  return {(1.0 - t) * a.x + t * b.x, (1.0 - t) * a.y + t * b.y};
}

inline double max_hessian_norm(const GridField& f, const std::vector<std::size_t>& nodes) {
  double m2 = 0.0;
  for (std::size_t k : nodes) {
    if (f.mask->full_stencil(k)) m2 = std::max(m2, spectral_norm(fd_hessian(f, k), f.mask->dimension()));
  }
  return m2;
}

/// Sentinel violation for structural failures (empty or non-convex sets).
inline constexpr double kStructuralViolation = 1e300;

}  // namespace plc::detail
