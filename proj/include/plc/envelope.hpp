#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "plc/field.hpp"

namespace plc {

/// One lower facet: a segment (1D, `count` = 2) or triangle (2D, `count` = 3)
/// of interior node indices, counter-clockwise, carrying the affine function
/// p . x + offset in physical coordinates.
struct EnvelopeFacet {
  std::array<std::size_t, 3> vertices{};
  int count = 0;
  Vec2 p{0.0, 0.0};
  double offset = 0.0;
};

struct FacetDecomposition {
  std::vector<double> weights;       // t_i > 0, sum 1
  std::vector<std::size_t> nodes;    // interior node indices
  std::vector<Point> points;         // x_i
  Vec2 p{0.0, 0.0};                  // common facet gradient
  std::int64_t facet = -1;           // -1 when the query is a contact node
};

/// Discrete lower convex envelope of a grid field.
///
/// Nodes closer to the boundary than the exclusion band are left out of the
/// hull and keep their source value in `values()`; every included node gets
/// the value of the lower facet above which it lies.
class Envelope {
 public:
  const GridField& source() const { return source_; }
  const GridField& values() const { return values_; }
  const std::vector<EnvelopeFacet>& facets() const { return facets_; }
  const std::vector<std::uint8_t>& included() const { return included_; }
  /// Contact flags computed with `tolerance()`.
  const std::vector<std::uint8_t>& contact() const { return contact_; }
  double tolerance() const { return tolerance_; }
  double exclusion_band() const { return band_; }
  /// A facet whose closed projection contains node k, or -1 if excluded.
  std::int64_t facet_of_node(std::size_t k) const { return node_facet_[k]; }
  std::size_t included_count() const;

  friend Envelope convex_envelope(const GridField& field, double exclusion_band);

 private:
  Envelope() = default;

  GridField source_;
  GridField values_;
  std::vector<EnvelopeFacet> facets_;
  std::vector<std::uint8_t> included_;
  std::vector<std::uint8_t> contact_;
  std::vector<std::int64_t> node_facet_;
  double tolerance_ = 0.0;
  double band_ = 0.0;
};

/// max(2h, 0.02 D).
double default_exclusion_band(const GridMask& mask);

/// 1e-9 range(w) + 4 h^2 M2 over `nodes`, M2 being the largest
/// finite-difference Hessian norm among nodes with a full stencil.
double convexity_tolerance(const GridField& w, const std::vector<std::size_t>& nodes);

/// Lower convex envelope of the nodes at distance >= `exclusion_band` from
/// the boundary. Throws ConfigError with fewer than n + 2 included nodes or
/// when the included nodes are collinear in 2D.
Envelope convex_envelope(const GridField& field, double exclusion_band);
Envelope convex_envelope(const GridField& field);

/// Value of the lower facet containing `p`. Throws DomainViolation outside
/// the hull of the included nodes.
double evaluate_envelope(const Envelope& env, Point p);

/// Included nodes with field - envelope <= tol.
std::vector<std::uint8_t> contact_set(const GridField& field, const Envelope& env, double tol);

/// Caratheodory data at `p`: the barycentric weights of the containing facet,
/// with weights below 1e-12 dropped and the rest renormalized. A hull vertex
/// returns itself with weight 1 and facet -1.
FacetDecomposition facet_decomposition(const Envelope& env, Point p);

/// `facet_id,v0,v1[,v2],p_x[,p_y],offset` with a header row.
void write_facet_csv(std::ostream& os, const Envelope& env);

}  // namespace plc
