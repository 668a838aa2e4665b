#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace plc {

/// A point in the plane. One-dimensional domains use `x` only.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class DomainKind { interval, polygon, disc, ellipse };

std::string to_string(DomainKind kind);

/// Axis-aligned bounding box.
struct Box {
  Point lo;
  Point hi;
};

/// A validated bounded convex region with nonempty interior.
///
/// Polygons are stored counter-clockwise and must be strictly convex. All
/// queries are exact up to floating point except the ellipse boundary
/// distance, which is obtained by root finding on the normal-foot equation.
class ConvexDomain {
 public:
  static ConvexDomain interval(double a, double b);
  static ConvexDomain polygon(std::vector<Point> vertices);
  static ConvexDomain disc(Point center, double radius);
  static ConvexDomain ellipse(Point center, double semi_x, double semi_y);

  /// Parses `{"kind":"polygon","vertices":[[x,y],...]}` and friends.
  static ConvexDomain from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  DomainKind kind() const { return kind_; }
  int dimension() const { return kind_ == DomainKind::interval ? 1 : 2; }

  // interval
  double a() const { return lo_; }
  double b() const { return hi_; }
  // polygon
  const std::vector<Point>& vertices() const { return vertices_; }
  // disc / ellipse
  Point center() const { return center_; }
  double radius() const { return semi_[0]; }
  std::array<double, 2> semi_axes() const { return semi_; }

  double diameter() const;
  Box bounds() const;
  double area() const;  // length for intervals

  /// Strict membership: points on the boundary are outside.
  bool contains(Point p) const;
  /// Distance to the boundary; zero on or outside the boundary.
  double boundary_distance(Point p) const;
  /// Distance from an interior point to the boundary along +/- `axis`.
  /// `direction` is -1 or +1. Returns +inf if the ray never leaves the domain.
  double axis_distance(Point p, int axis, int direction) const;

  /// Side lengths when the polygon is a rectangle (any orientation).
  bool rectangle_sides(double& side_a, double& side_b) const;

 private:
  ConvexDomain() = default;

  DomainKind kind_ = DomainKind::interval;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<Point> vertices_;
  Point center_;
  std::array<double, 2> semi_{0.0, 0.0};
};

/// Random strictly convex polygon with vertices at sorted random angles on an
/// ellipse. Reproducible for a fixed seed.
ConvexDomain random_convex_polygon(std::uint64_t seed, std::size_t vertex_count,
                                   double semi_x, double semi_y,
                                   Point center = {});

/// Uniform grid restricted to the interior of a domain.
///
/// Nodes are numbered row-major with x varying fastest: flat index
/// `i + dims[0] * j`. Interior nodes get a compact index in the same order.
/// For every interior node and each axis direction (-x, +x, -y, +y) the mask
/// stores the fractional distance, in units of h, to the next node or to the
/// boundary if that node is outside. Gaps lie in (0, 1].
class GridMask {
 public:
  enum Direction : int { west = 0, east = 1, south = 2, north = 3 };

  int dimension() const { return dimension_; }
  Point origin() const { return origin_; }
  double h() const { return h_; }
  std::array<std::size_t, 2> dims() const { return dims_; }
  std::size_t node_count() const { return dims_[0] * dims_[1]; }
  double diameter() const { return diameter_; }

  /// Number of interior nodes.
  std::size_t size() const { return interior_.size(); }

  bool inside_node(std::size_t flat) const { return inside_[flat] != 0; }
  const std::vector<std::uint8_t>& inside_flags() const { return inside_; }

  std::size_t flat_index(std::size_t k) const { return interior_[k]; }
  std::array<std::int64_t, 2> lattice(std::size_t k) const;
  Point position(std::size_t k) const;
  Point node_position(std::int64_t i, std::int64_t j) const;

  /// Interior index of lattice node (i, j), or -1 when outside/out of range.
  std::int64_t interior_at(std::int64_t i, std::int64_t j) const;
  /// Interior index of the neighbour in direction `d`, or -1.
  std::int64_t neighbour(std::size_t k, int d) const;

  double gap(std::size_t k, int d) const { return gaps_[k][static_cast<std::size_t>(d)]; }
  const std::array<double, 4>& gaps(std::size_t k) const { return gaps_[k]; }
  double boundary_distance(std::size_t k) const { return distance_[k]; }

  /// True when every axis neighbour is interior (and the diagonal ones in 2D).
  bool full_stencil(std::size_t k) const;

  friend GridMask rasterize(const ConvexDomain& domain, double h);

 private:
  GridMask() = default;

  int dimension_ = 1;
  Point origin_;
  double h_ = 0.0;
  std::array<std::size_t, 2> dims_{0, 1};
  double diameter_ = 0.0;
  std::vector<std::uint8_t> inside_;
  std::vector<std::int64_t> to_interior_;
  std::vector<std::size_t> interior_;
  std::vector<std::array<double, 4>> gaps_;
  std::vector<double> distance_;
};

/// Rasterizes `domain` on the grid of spacing `h` anchored at the lower corner
/// of its bounding box. Throws GridTooCoarse when no node is interior.
GridMask rasterize(const ConvexDomain& domain, double h);

/// Throws GridTooCoarse unless the grid resolves the diameter with at least
/// `min_nodes` spacings.
void require_resolution(const GridMask& mask, double min_nodes = 8.0);

}  // namespace plc
