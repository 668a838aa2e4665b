#include "plc/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "plc/error.hpp"
#include "plc/lower_hull.hpp"

namespace plc {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

struct Barycentric {
  std::array<double, 3> t{};
  double min = 0.0;
};

// Barycentric coordinates of lattice point (x, y) in facet f.
Barycentric barycentric(const GridMask& mask, const EnvelopeFacet& f, double x, double y) {
  std::array<std::array<double, 2>, 3> v{};
  for (int r = 0; r < 3; ++r) {
    const auto l = mask.lattice(f.vertices[static_cast<std::size_t>(r)]);
    v[static_cast<std::size_t>(r)] = {static_cast<double>(l[0]), static_cast<double>(l[1])};
  }
  auto area = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double px, double py) {
    return (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
  };
  const double total = area(v[0], v[1], v[2][0], v[2][1]);
  Barycentric out;
  out.t[0] = area(v[1], v[2], x, y) / total;
  out.t[1] = area(v[2], v[0], x, y) / total;
  out.t[2] = area(v[0], v[1], x, y) / total;
  out.min = std::min({out.t[0], out.t[1], out.t[2]});
  return out;
}

// Lattice coordinates of a physical point.
std::array<double, 2> to_lattice(const GridMask& mask, Point p) {
  return {(p.x - mask.origin().x) / mask.h(),
          mask.dimension() == 2 ? (p.y - mask.origin().y) / mask.h() : 0.0};
}

constexpr double kInsideSlack = 1e-9;

// Facet containing p with its barycentric coordinates (2D), or the segment
// index and the weight of its right end (1D).
std::pair<std::int64_t, Barycentric> locate(const Envelope& env, Point p) {
  const GridMask& mask = *env.source().mask;
  const auto lat = to_lattice(mask, p);
  const auto& facets = env.facets();
  if (mask.dimension() == 1) {
    // Facets are sorted left to right.
    for (std::size_t f = 0; f < facets.size(); ++f) {
      const double xa = static_cast<double>(mask.lattice(facets[f].vertices[0])[0]);
      const double xb = static_cast<double>(mask.lattice(facets[f].vertices[1])[0]);
      if (lat[0] >= xa - kInsideSlack && lat[0] <= xb + kInsideSlack) {
        Barycentric b;
        b.t[1] = std::clamp((lat[0] - xa) / (xb - xa), 0.0, 1.0);
        b.t[0] = 1.0 - b.t[1];
        b.min = std::min(b.t[0], b.t[1]);
        return {static_cast<std::int64_t>(f), b};
      }
    }
    return {-1, {}};
  }
  std::int64_t best = -1;
  Barycentric best_b;
  best_b.min = -std::numeric_limits<double>::infinity();
  auto consider = [&](std::int64_t f) {
    if (f < 0) return;
    const Barycentric b = barycentric(mask, facets[static_cast<std::size_t>(f)], lat[0], lat[1]);
    if (b.min > best_b.min) {
      best = f;
      best_b = b;
    }
  };
  const auto i0 = static_cast<std::int64_t>(std::floor(lat[0]));
  const auto j0 = static_cast<std::int64_t>(std::floor(lat[1]));
  for (std::int64_t dj = -1; dj <= 2; ++dj) {
    for (std::int64_t di = -1; di <= 2; ++di) {
      const std::int64_t k = mask.interior_at(i0 + di, j0 + dj);
      if (k >= 0) consider(env.facet_of_node(static_cast<std::size_t>(k)));
    }
  }
  if (best_b.min < -kInsideSlack) {
    for (std::size_t f = 0; f < facets.size(); ++f) consider(static_cast<std::int64_t>(f));
  }
  if (best_b.min < -kInsideSlack) return {-1, {}};
  return {best, best_b};
}

void set_affine(const GridMask& mask, const std::vector<double>& z, EnvelopeFacet& f) {
  const double h = mask.h();
  const Point o = mask.origin();
  if (f.count == 2) {
    const auto a = mask.lattice(f.vertices[0]);
    const auto b = mask.lattice(f.vertices[1]);
    const double slope = (z[f.vertices[1]] - z[f.vertices[0]]) / static_cast<double>(b[0] - a[0]);
    f.p = {slope / h, 0.0};
    f.offset = z[f.vertices[0]] - f.p[0] * (o.x + h * static_cast<double>(a[0]));
    return;
  }
  const auto a = mask.lattice(f.vertices[0]);
  const auto b = mask.lattice(f.vertices[1]);
  const auto c = mask.lattice(f.vertices[2]);
  const double za = z[f.vertices[0]];
  const double dzb = z[f.vertices[1]] - za;
  const double dzc = z[f.vertices[2]] - za;
  const auto bx = static_cast<double>(b[0] - a[0]);
  const auto by = static_cast<double>(b[1] - a[1]);
  const auto cx = static_cast<double>(c[0] - a[0]);
  const auto cy = static_cast<double>(c[1] - a[1]);
  const double area2 = bx * cy - by * cx;
  const double gx = (dzb * cy - dzc * by) / area2;
  const double gy = (dzc * bx - dzb * cx) / area2;
  f.p = {gx / h, gy / h};
  f.offset = za - f.p[0] * (o.x + h * static_cast<double>(a[0])) - f.p[1] * (o.y + h * static_cast<double>(a[1]));
}

}  // namespace

std::size_t Envelope::included_count() const {
  return static_cast<std::size_t>(std::count(included_.begin(), included_.end(), std::uint8_t{1}));
}

double default_exclusion_band(const GridMask& mask) {
  return std::max(2.0 * mask.h(), 0.02 * mask.diameter());
}

double convexity_tolerance(const GridField& w, const std::vector<std::size_t>& nodes) {
  if (nodes.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double m2 = 0.0;
  const GridMask& mask = *w.mask;
  for (std::size_t k : nodes) {
    lo = std::min(lo, w.values[k]);
    hi = std::max(hi, w.values[k]);
    if (mask.full_stencil(k)) m2 = std::max(m2, spectral_norm(fd_hessian(w, k), mask.dimension()));
  }
  return 1e-9 * (hi - lo) + 4.0 * mask.h() * mask.h() * m2;
}

Envelope convex_envelope(const GridField& field) {
  return convex_envelope(field, default_exclusion_band(*field.mask));
}

Envelope convex_envelope(const GridField& field, double exclusion_band) {
  if (!(exclusion_band >= 0.0)) throw ConfigError("exclusion band must be nonnegative");
  const GridMask& mask = *field.mask;
  const int dim = mask.dimension();
  const std::size_t n = field.size();

  Envelope env;
  env.source_ = field;
  env.band_ = exclusion_band;
  env.included_.assign(n, 0);
  env.node_facet_.assign(n, -1);
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < n; ++k) {
    if (mask.boundary_distance(k) >= exclusion_band) {
      if (!std::isfinite(field.values[k])) {
        std::ostringstream os;
        os << "convex_envelope: non-finite value at node " << k;
        throw ConfigError(os.str());
      }
      env.included_[k] = 1;
      nodes.push_back(k);
    }
  }
  if (nodes.size() < static_cast<std::size_t>(dim + 2)) {
    std::ostringstream os;
    os << "convex_envelope: " << nodes.size() << " included nodes, need at least " << dim + 2;
    throw ConfigError(os.str());
  }

  std::vector<double> out = field.values;
  if (dim == 1) {
    std::vector<std::int64_t> x;
    std::vector<double> z;
    for (std::size_t k : nodes) {
      x.push_back(mask.lattice(k)[0]);
      z.push_back(field.values[k]);
    }
    const auto chain = hull::lower_hull_1d(x, z);
    for (std::size_t s = 0; s + 1 < chain.size(); ++s) {
      EnvelopeFacet f;
      f.count = 2;
      f.vertices = {nodes[static_cast<std::size_t>(chain[s])], nodes[static_cast<std::size_t>(chain[s + 1])], 0};
      set_affine(mask, field.values, f);
      const auto fid = static_cast<std::int64_t>(env.facets_.size());
      const std::int64_t xa = x[static_cast<std::size_t>(chain[s])];
      const std::int64_t xb = x[static_cast<std::size_t>(chain[s + 1])];
      const double za = z[static_cast<std::size_t>(chain[s])];
      const double zb = z[static_cast<std::size_t>(chain[s + 1])];
      for (int q = chain[s]; q <= chain[s + 1]; ++q) {
        const std::size_t k = nodes[static_cast<std::size_t>(q)];
        const std::int64_t xq = x[static_cast<std::size_t>(q)];
        if (env.node_facet_[k] < 0) env.node_facet_[k] = fid;
        out[k] = (static_cast<double>(xb - xq) * za + static_cast<double>(xq - xa) * zb) /
                 static_cast<double>(xb - xa);
      }
      env.facets_.push_back(f);
    }
  } else {
    std::vector<hull::LatticePoint> pts;
    pts.reserve(nodes.size());
    for (std::size_t k : nodes) {
      const auto l = mask.lattice(k);
      pts.push_back({l[0], l[1], field.values[k]});
    }
    const auto tris = hull::lower_hull_2d(pts);
    std::vector<std::uint8_t> assigned(n, 0);
    for (const auto& tri : tris) {
      EnvelopeFacet f;
      f.count = 3;
      for (int r = 0; r < 3; ++r) f.vertices[static_cast<std::size_t>(r)] = nodes[static_cast<std::size_t>(tri[static_cast<std::size_t>(r)])];
      set_affine(mask, field.values, f);
      const auto fid = static_cast<std::int64_t>(env.facets_.size());
      env.facets_.push_back(f);

      const auto& a = pts[static_cast<std::size_t>(tri[0])];
      const auto& b = pts[static_cast<std::size_t>(tri[1])];
      const auto& c = pts[static_cast<std::size_t>(tri[2])];
      const std::int64_t area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
      const std::array<const hull::LatticePoint*, 3> v{&a, &b, &c};
      const std::int64_t ylo = std::min({a.y, b.y, c.y});
      const std::int64_t yhi = std::max({a.y, b.y, c.y});
      for (std::int64_t y = ylo; y <= yhi; ++y) {
        // Scanline: each CCW edge (e0 -> e1) bounds x from one side.
        std::int64_t xlo = std::min({a.x, b.x, c.x});
        std::int64_t xhi = std::max({a.x, b.x, c.x});
        for (int e = 0; e < 3 && xlo <= xhi; ++e) {
          const auto& e0 = *v[static_cast<std::size_t>(e)];
          const auto& e1 = *v[static_cast<std::size_t>((e + 1) % 3)];
          const std::int64_t dx = e1.x - e0.x;
          const std::int64_t dy = e1.y - e0.y;
          // dx (y - y0) - dy (x - x0) >= 0
          const std::int64_t cst = dx * (y - e0.y) + dy * e0.x;
          if (dy == 0) {
            if (dx * (y - e0.y) < 0) xhi = xlo - 1;
          } else if (dy > 0) {
            xhi = std::min(xhi, floor_div(cst, dy));
          } else {
            xlo = std::max(xlo, ceil_div(cst, dy));
          }
        }
        for (std::int64_t x = xlo; x <= xhi; ++x) {
          const std::int64_t k = mask.interior_at(x, y);
          if (k < 0 || !env.included_[static_cast<std::size_t>(k)]) continue;
          const auto ku = static_cast<std::size_t>(k);
          if (assigned[ku]) continue;
          assigned[ku] = 1;
          env.node_facet_[ku] = fid;
          // Integer sub-areas keep vertex values exact.
          const std::int64_t wa = (b.x - x) * (c.y - y) - (b.y - y) * (c.x - x);
          const std::int64_t wb = (c.x - x) * (a.y - y) - (c.y - y) * (a.x - x);
          const std::int64_t wc = area2 - wa - wb;
          out[ku] = (static_cast<double>(wa) * a.z + static_cast<double>(wb) * b.z +
                     static_cast<double>(wc) * c.z) /
                    static_cast<double>(area2);
        }
      }
    }
    for (std::size_t k : nodes) {
      if (!assigned[k]) {
        std::ostringstream os;
        os << "convex_envelope: included nodes are degenerate (node " << k << " not covered)";
        throw ConfigError(os.str());
      }
    }
  }

  env.values_ = GridField(field.mask, std::move(out), FieldRole::w_envelope);
  env.tolerance_ = convexity_tolerance(field, nodes);
  env.contact_ = contact_set(field, env, env.tolerance_);
  return env;
}

double evaluate_envelope(const Envelope& env, Point p) {
  const auto [f, b] = locate(env, p);
  if (f < 0) {
    std::ostringstream os;
    os << "evaluate_envelope: point (" << p.x << ", " << p.y << ") outside the envelope hull";
    throw DomainViolation(os.str());
  }
  const EnvelopeFacet& facet = env.facets()[static_cast<std::size_t>(f)];
  const auto& z = env.source().values;
  double v = 0.0;
  for (int r = 0; r < facet.count; ++r) v += b.t[static_cast<std::size_t>(r)] * z[facet.vertices[static_cast<std::size_t>(r)]];
  return v;
}

std::vector<std::uint8_t> contact_set(const GridField& field, const Envelope& env, double tol) {
  std::vector<std::uint8_t> out(field.size(), 0);
  const auto& ev = env.values().values;
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (env.included()[k] && field.values[k] - ev[k] <= tol) out[k] = 1;
  }
  return out;
}

FacetDecomposition facet_decomposition(const Envelope& env, Point p) {
  const GridMask& mask = *env.source().mask;
  const auto [f, b] = locate(env, p);
  if (f < 0) {
    std::ostringstream os;
    os << "facet_decomposition: point (" << p.x << ", " << p.y << ") outside the envelope hull";
    throw DomainViolation(os.str());
  }
  const EnvelopeFacet& facet = env.facets()[static_cast<std::size_t>(f)];
  FacetDecomposition d;
  d.facet = f;
  d.p = facet.p;
  double total = 0.0;
  for (int r = 0; r < facet.count; ++r) {
    const double t = std::max(0.0, b.t[static_cast<std::size_t>(r)]);
    if (t < 1e-12) continue;
    const std::size_t k = facet.vertices[static_cast<std::size_t>(r)];
    d.weights.push_back(t);
    d.nodes.push_back(k);
    d.points.push_back(mask.position(k));
    total += t;
  }
  for (double& t : d.weights) t /= total;
  // A hull vertex is a contact node and stands for itself.
  if (d.nodes.size() == 1) {
    d.weights = {1.0};
    d.facet = -1;
  }
  return d;
}

void write_facet_csv(std::ostream& os, const Envelope& env) {
  const int dim = env.source().mask->dimension();
  os << "facet_id,v0,v1";
  if (dim == 2) os << ",v2";
  os << ",p_x";
  if (dim == 2) os << ",p_y";
  os << ",offset\n";
  const auto old_precision = os.precision(17);
  for (std::size_t f = 0; f < env.facets().size(); ++f) {
    const EnvelopeFacet& facet = env.facets()[f];
    os << f;
    for (int r = 0; r < facet.count; ++r) os << ',' << facet.vertices[static_cast<std::size_t>(r)];
    os << ',' << facet.p[0];
    if (dim == 2) os << ',' << facet.p[1];
    os << ',' << facet.offset << '\n';
  }
  os.precision(old_precision);
}

}  // namespace plc
