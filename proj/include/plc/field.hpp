#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plc/geometry.hpp"

namespace plc {

/// What a sampled field represents. The numeric values are the PLSF role tags.
enum class FieldRole : std::uint8_t {
  u = 0,           ///< max-normalized ground state
  log_neg = 1,     ///< v = -log u
  w_kappa = 2,     ///< (-log(kappa u))^(1/2)
  w_envelope = 3,  ///< convex envelope of w_kappa
  u_kappa = 4,     ///< ground state rebuilt from the envelope
};

std::string to_string(FieldRole role);
FieldRole role_from_tag(std::uint8_t tag);

using Vec2 = std::array<double, 2>;

/// One value per interior node of a shared mask.
struct GridField {
  std::shared_ptr<const GridMask> mask;
  std::vector<double> values;
  FieldRole role = FieldRole::u;

  GridField() = default;
  GridField(std::shared_ptr<const GridMask> m, std::vector<double> v, FieldRole r);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }

  /// Linear (1D) or bilinear (2D) interpolation. Returns nullopt when a
  /// corner with nonzero weight is not an interior node.
  std::optional<double> interpolate(Point p) const;
};

/// Samples `f` at every interior node.
template <typename F>
GridField sample(std::shared_ptr<const GridMask> mask, F&& f, FieldRole role = FieldRole::u) {
  std::vector<double> v(mask->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(mask->position(k));
  return GridField(std::move(mask), std::move(v), role);
}

/// Interior nodes whose distance to the boundary is at least `band`.
std::vector<std::size_t> banded_nodes(const GridMask& mask, double band);

/// Default interior band for checks: max(4h, 0.02 D).
double default_check_band(const GridMask& mask);

/// Finite-difference Hessian at a node with a full stencil (1D: [0] only).
std::array<double, 3> fd_hessian(const GridField& f, std::size_t k);

/// Smallest second difference quotient (f(x+hv) + f(x-hv) - 2f(x)) / (h|v|)^2
/// over the lattice directions v in {(1,0), (0,1), (1,+-1), (1,+-2), (2,+-1)}
/// (1D: v = 1). A monotone estimate of the smallest Hessian eigenvalue: it
/// is never negative on convex samples. Nullopt if a stencil node is missing.
std::optional<double> directional_min_curvature(const GridField& f, std::size_t k);

/// Smallest and largest-magnitude eigenvalue of the symmetric 2x2 matrix
/// [[xx, xy], [xy, yy]].
double min_eigenvalue(const std::array<double, 3>& hess, int dimension);
double spectral_norm(const std::array<double, 3>& hess, int dimension);

}  // namespace plc
