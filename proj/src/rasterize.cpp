#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plc/error.hpp"
#include "plc/geometry.hpp"

namespace plc {

std::array<std::int64_t, 2> GridMask::lattice(std::size_t k) const {
  const std::size_t flat = interior_[k];
  return {static_cast<std::int64_t>(flat % dims_[0]), static_cast<std::int64_t>(flat / dims_[0])};
}

Point GridMask::node_position(std::int64_t i, std::int64_t j) const {
  Point p{origin_.x + static_cast<double>(i) * h_, 0.0};
  if (dimension_ == 2) p.y = origin_.y + static_cast<double>(j) * h_;
  return p;
}

Point GridMask::position(std::size_t k) const {
  const auto ij = lattice(k);
  return node_position(ij[0], ij[1]);
}

std::int64_t GridMask::interior_at(std::int64_t i, std::int64_t j) const {
  if (i < 0 || j < 0) return -1;
  if (static_cast<std::size_t>(i) >= dims_[0] || static_cast<std::size_t>(j) >= dims_[1]) {
    return -1;
  }
  return to_interior_[static_cast<std::size_t>(i) + dims_[0] * static_cast<std::size_t>(j)];
}

std::int64_t GridMask::neighbour(std::size_t k, int d) const {
  const auto ij = lattice(k);
  switch (d) {
    case west: return interior_at(ij[0] - 1, ij[1]);
    case east: return interior_at(ij[0] + 1, ij[1]);
    case south: return dimension_ == 2 ? interior_at(ij[0], ij[1] - 1) : -1;
    case north: return dimension_ == 2 ? interior_at(ij[0], ij[1] + 1) : -1;
    default: return -1;
  }
}

bool GridMask::full_stencil(std::size_t k) const {
  const auto ij = lattice(k);
  const std::int64_t i = ij[0];
  const std::int64_t j = ij[1];
  if (dimension_ == 1) return interior_at(i - 1, j) >= 0 && interior_at(i + 1, j) >= 0;
  for (std::int64_t dj = -1; dj <= 1; ++dj) {
    for (std::int64_t di = -1; di <= 1; ++di) {
      if (interior_at(i + di, j + dj) < 0) return false;
    }
  }
  return true;
}

GridMask rasterize(const ConvexDomain& domain, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    std::ostringstream os;
    os << "grid spacing must be positive, got " << h;
    throw ConfigError(os.str());
  }
  const Box box = domain.bounds();
  auto count = [h](double lo, double hi) {
    const double spans = std::ceil((hi - lo) / h - 1e-9);
    if (spans > 1e8) throw ConfigError("grid spacing too small for the domain extent");
    return static_cast<std::size_t>(std::max(spans, 1.0)) + 1;
  };

  GridMask m;
  m.dimension_ = domain.dimension();
  m.origin_ = box.lo;
  m.h_ = h;
  m.diameter_ = domain.diameter();
  m.dims_ = {count(box.lo.x, box.hi.x), m.dimension_ == 2 ? count(box.lo.y, box.hi.y) : 1};
  const std::size_t total = m.dims_[0] * m.dims_[1];
  m.inside_.assign(total, 0);
  m.to_interior_.assign(total, -1);

  for (std::size_t j = 0; j < m.dims_[1]; ++j) {
    for (std::size_t i = 0; i < m.dims_[0]; ++i) {
      const std::size_t flat = i + m.dims_[0] * j;
      const Point p = m.node_position(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j));
      if (domain.contains(p)) {
        m.inside_[flat] = 1;
        m.to_interior_[flat] = static_cast<std::int64_t>(m.interior_.size());
        m.interior_.push_back(flat);
      }
    }
  }
  if (m.interior_.empty()) {
    std::ostringstream os;
    os << "grid too coarse: no interior node at h = " << h;
    throw GridTooCoarse(os.str());
  }

  const std::size_t n = m.interior_.size();
  m.gaps_.resize(n);
  m.distance_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point p = m.position(k);
    m.distance_[k] = domain.boundary_distance(p);
    for (int d = 0; d < 4; ++d) {
      double& gap = m.gaps_[k][static_cast<std::size_t>(d)];
      gap = 1.0;
      const int axis = d / 2;
      if (axis == 1 && m.dimension_ == 1) continue;
      if (m.neighbour(k, d) >= 0) continue;
      const double along = domain.axis_distance(p, axis, (d % 2 == 0) ? -1 : 1) / h;
      gap = std::clamp(along, std::numeric_limits<double>::min(), 1.0);
    }
  }
  return m;
}

void require_resolution(const GridMask& mask, double min_nodes) {
  if (mask.diameter() / mask.h() < min_nodes) {
    std::ostringstream os;
    os << "grid too coarse: diameter " << mask.diameter() << " spans only "
       << mask.diameter() / mask.h() << " spacings (need at least " << min_nodes << ")";
    throw GridTooCoarse(os.str());
  }
}

}  // namespace plc
