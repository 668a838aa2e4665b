#include "plc/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plc/error.hpp"

namespace plc {

std::string to_string(FieldRole role) {
  switch (role) {
    case FieldRole::u: return "u";
    case FieldRole::log_neg: return "log_neg";
    case FieldRole::w_kappa: return "w_kappa";
    case FieldRole::w_envelope: return "w_envelope";
    case FieldRole::u_kappa: return "u_kappa";
  }
  return "unknown";
}

FieldRole role_from_tag(std::uint8_t tag) {
  if (tag > 4) throw IoError("unknown field role tag " + std::to_string(tag));
  return static_cast<FieldRole>(tag);
}

GridField::GridField(std::shared_ptr<const GridMask> m, std::vector<double> v, FieldRole r)
    : mask(std::move(m)), values(std::move(v)), role(r) {
  if (!mask) throw ConfigError("field without a mask");
  if (values.size() != mask->size()) {
    throw ConfigError("field has " + std::to_string(values.size()) + " values but mask has " +
                      std::to_string(mask->size()) + " interior nodes");
  }
}

std::optional<double> GridField::interpolate(Point p) const {
  const GridMask& m = *mask;
  const double h = m.h();
  const double fx = (p.x - m.origin().x) / h;
  const double fy = m.dimension() == 2 ? (p.y - m.origin().y) / h : 0.0;
  auto split = [](double f, std::int64_t& base, double& frac) {
    const double fl = std::floor(f);
    base = static_cast<std::int64_t>(fl);
    frac = f - fl;
    // Snap values that are a rounding error away from a node.
    if (frac < 1e-12) frac = 0.0;
    if (frac > 1.0 - 1e-12) {
      frac = 0.0;
      ++base;
    }
  };
  std::int64_t i0 = 0;
  std::int64_t j0 = 0;
  double tx = 0.0;
  double ty = 0.0;
  split(fx, i0, tx);
  if (m.dimension() == 2) split(fy, j0, ty);

  double acc = 0.0;
  for (int dj = 0; dj < (m.dimension() == 2 ? 2 : 1); ++dj) {
    for (int di = 0; di < 2; ++di) {
      const double wx = di == 0 ? 1.0 - tx : tx;
      const double wy = m.dimension() == 2 ? (dj == 0 ? 1.0 - ty : ty) : 1.0;
      const double weight = wx * wy;
      if (weight == 0.0) continue;
      const std::int64_t k = m.interior_at(i0 + di, j0 + dj);
      if (k < 0) return std::nullopt;
      acc += weight * values[static_cast<std::size_t>(k)];
    }
  }
  return acc;
}

std::vector<std::size_t> banded_nodes(const GridMask& mask, double band) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask.boundary_distance(k) >= band) out.push_back(k);
  }
  return out;
}

double default_check_band(const GridMask& mask) {
  return std::max(4.0 * mask.h(), 0.02 * mask.diameter());
}

std::array<double, 3> fd_hessian(const GridField& f, std::size_t k) {
  const GridMask& m = *f.mask;
  const auto ij = m.lattice(k);
  const double h2 = m.h() * m.h();
  auto at = [&](std::int64_t di, std::int64_t dj) {
    const std::int64_t q = m.interior_at(ij[0] + di, ij[1] + dj);
    if (q < 0) throw ConfigError("finite-difference Hessian needs a full stencil");
    return f.values[static_cast<std::size_t>(q)];
  };
  const double c = f.values[k];
  const double xx = (at(1, 0) - 2.0 * c + at(-1, 0)) / h2;
  if (m.dimension() == 1) return {xx, 0.0, 0.0};
  const double yy = (at(0, 1) - 2.0 * c + at(0, -1)) / h2;
  const double xy = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h2);
  return {xx, yy, xy};
}

std::optional<double> directional_min_curvature(const GridField& f, std::size_t k) {
  static constexpr std::array<std::array<int, 2>, 8> kDirections{
      {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {1, 2}, {2, 1}, {1, -2}, {2, -1}}};
  const GridMask& m = *f.mask;
  const auto ij = m.lattice(k);
  const double h2 = m.h() * m.h();
  const std::size_t count = m.dimension() == 1 ? 1 : kDirections.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < count; ++d) {
    const auto [vx, vy] = kDirections[d];
    const std::int64_t plus = m.interior_at(ij[0] + vx, ij[1] + vy);
    const std::int64_t minus = m.interior_at(ij[0] - vx, ij[1] - vy);
    if (plus < 0 || minus < 0) return std::nullopt;
    const double second = f.values[static_cast<std::size_t>(plus)] + f.values[static_cast<std::size_t>(minus)] -
                          2.0 * f.values[k];
    best = std::min(best, second / (h2 * (vx * vx + vy * vy)));
  }
  return best;
}

double min_eigenvalue(const std::array<double, 3>& hess, int dimension) {
  if (dimension == 1) return hess[0];
  const double mean = 0.5 * (hess[0] + hess[1]);
  const double radius = std::hypot(0.5 * (hess[0] - hess[1]), hess[2]);
  return mean - radius;
}

double spectral_norm(const std::array<double, 3>& hess, int dimension) {
  if (dimension == 1) return std::abs(hess[0]);
  const double mean = 0.5 * (hess[0] + hess[1]);
  const double radius = std::hypot(0.5 * (hess[0] - hess[1]), hess[2]);
  return std::abs(mean) + radius;
}

}  // namespace plc
