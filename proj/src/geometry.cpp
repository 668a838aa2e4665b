#include "plc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "plc/error.hpp"
#include "plc/random.hpp"

namespace plc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string describe(Point p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ConfigError(std::string("non-finite ") + what);
}

double robust_length(double a, double b) { return std::hypot(a, b); }

// Root of the normal-foot equation for an ellipse with semi-axes e0 >= e1 and
// a query point (y0, y1) with y0, y1 > 0 (Eberly's parametrisation).
double ellipse_root(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = g < 0.0 ? 0.0 : robust_length(n0, z1) - 1.0;
  double s = 0.0;
  for (int it = 0; it < 1100; ++it) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double ratio0 = n0 / (s + r0);
    const double ratio1 = z1 / (s + 1.0);
    const double value = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
    if (value > 0.0) {
      s0 = s;
    } else if (value < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

// Distance from (y0, y1) in the first quadrant to the ellipse with e0 >= e1.
double ellipse_distance_quadrant(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double s = ellipse_root(r0, z0, z1, g);
      const double x0 = r0 * y0 / (s + r0);
      const double x1 = y1 / (s + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    return std::hypot(x0 - y0, x1);
  }
  return std::abs(y0 - e0);
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::polygon: return "polygon";
    case DomainKind::disc: return "disc";
    case DomainKind::ellipse: return "ellipse";
  }
  return "unknown";
}

ConvexDomain ConvexDomain::interval(double a, double b) {
  require_finite(a, "interval endpoint");
  require_finite(b, "interval endpoint");
  if (!(b > a)) {
    std::ostringstream os;
    os << "degenerate interval: a = " << a << " must be smaller than b = " << b;
    throw ConfigError(os.str());
  }
  ConvexDomain d;
  d.kind_ = DomainKind::interval;
  d.lo_ = a;
  d.hi_ = b;
  return d;
}

ConvexDomain ConvexDomain::polygon(std::vector<Point> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) {
    throw ConfigError("degenerate polygon: " + std::to_string(n) +
                      " vertices given, at least 3 required");
  }
  for (const Point& p : vertices) {
    require_finite(p.x, "polygon vertex");
    require_finite(p.y, "polygon vertex");
  }
  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = vertices[i];
    const Point& q = vertices[(i + 1) % n];
    twice_area += p.x * q.y - q.x * p.y;
  }
  if (twice_area == 0.0) throw ConfigError("degenerate polygon: zero area");
  const double orientation = twice_area > 0.0 ? 1.0 : -1.0;

  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = vertices[(i + n - 1) % n];
    const Point& cur = vertices[i];
    const Point& next = vertices[(i + 1) % n];
    if (distance(prev, cur) == 0.0) {
      throw ConfigError("degenerate polygon: repeated vertex " + std::to_string(i) + " " +
                        describe(cur));
    }
    const double c = cross(prev, cur, next);
    const double scale = distance(prev, cur) * distance(cur, next);
    if (std::abs(c) <= 1e-14 * scale) {
      throw ConfigError("non-convex polygon: collinear vertex " + std::to_string(i) + " " +
                        describe(cur));
    }
    if (c * orientation < 0.0) {
      throw ConfigError("non-convex polygon: reflex vertex " + std::to_string(i) + " " +
                        describe(cur));
    }
    const double a1 = std::atan2(cur.y - prev.y, cur.x - prev.x);
    const double a2 = std::atan2(next.y - cur.y, next.x - cur.x);
    double turn = a2 - a1;
    while (turn > std::numbers::pi) turn -= 2.0 * std::numbers::pi;
    while (turn < -std::numbers::pi) turn += 2.0 * std::numbers::pi;
    turning += turn;
  }
  if (std::abs(std::abs(turning) - 2.0 * std::numbers::pi) > 1e-6) {
    throw ConfigError("non-convex polygon: vertex list winds more than once");
  }
  if (orientation < 0.0) std::reverse(vertices.begin(), vertices.end());

  ConvexDomain d;
  d.kind_ = DomainKind::polygon;
  d.vertices_ = std::move(vertices);
  return d;
}

ConvexDomain ConvexDomain::disc(Point center, double radius) {
  require_finite(center.x, "disc center");
  require_finite(center.y, "disc center");
  require_finite(radius, "disc radius");
  if (!(radius > 0.0)) {
    std::ostringstream os;
    os << "degenerate disc: radius " << radius << " must be positive";
    throw ConfigError(os.str());
  }
  ConvexDomain d;
  d.kind_ = DomainKind::disc;
  d.center_ = center;
  d.semi_ = {radius, radius};
  return d;
}

ConvexDomain ConvexDomain::ellipse(Point center, double semi_x, double semi_y) {
  require_finite(center.x, "ellipse center");
  require_finite(center.y, "ellipse center");
  require_finite(semi_x, "ellipse semi-axis");
  require_finite(semi_y, "ellipse semi-axis");
  if (!(semi_x > 0.0) || !(semi_y > 0.0)) {
    std::ostringstream os;
    os << "degenerate ellipse: semi-axes (" << semi_x << ", " << semi_y << ") must be positive";
    throw ConfigError(os.str());
  }
  ConvexDomain d;
  d.kind_ = DomainKind::ellipse;
  d.center_ = center;
  d.semi_ = {semi_x, semi_y};
  return d;
}

namespace {

Point point_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(std::string(what) + " must be a [x, y] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

double number_from_json(const nlohmann::json& spec, const char* key) {
  if (!spec.contains(key) || !spec.at(key).is_number()) {
    throw ConfigError(std::string("domain spec: missing numeric field '") + key + "'");
  }
  return spec.at(key).get<double>();
}

}  // namespace

ConvexDomain ConvexDomain::from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
    throw ConfigError("domain spec: expected an object with a string 'kind'");
  }
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "interval") {
    return interval(number_from_json(spec, "a"), number_from_json(spec, "b"));
  }
  if (kind == "polygon") {
    if (!spec.contains("vertices") || !spec.at("vertices").is_array()) {
      throw ConfigError("domain spec: polygon needs a 'vertices' array");
    }
    std::vector<Point> vs;
    for (const auto& v : spec.at("vertices")) vs.push_back(point_from_json(v, "vertex"));
    return polygon(std::move(vs));
  }
  if (kind == "disc") {
    if (!spec.contains("center")) throw ConfigError("domain spec: disc needs 'center'");
    return disc(point_from_json(spec.at("center"), "center"), number_from_json(spec, "radius"));
  }
  if (kind == "ellipse") {
    if (!spec.contains("center") || !spec.contains("semi_axes")) {
      throw ConfigError("domain spec: ellipse needs 'center' and 'semi_axes'");
    }
    const Point semi = point_from_json(spec.at("semi_axes"), "semi_axes");
    return ellipse(point_from_json(spec.at("center"), "center"), semi.x, semi.y);
  }
  throw ConfigError("domain spec: unknown kind '" + kind + "'");
}

nlohmann::json ConvexDomain::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  switch (kind_) {
    case DomainKind::interval:
      j["a"] = lo_;
      j["b"] = hi_;
      break;
    case DomainKind::polygon: {
      auto vs = nlohmann::json::array();
      for (const Point& p : vertices_) vs.push_back({p.x, p.y});
      j["vertices"] = vs;
      break;
    }
    case DomainKind::disc:
      j["center"] = {center_.x, center_.y};
      j["radius"] = semi_[0];
      break;
    case DomainKind::ellipse:
      j["center"] = {center_.x, center_.y};
      j["semi_axes"] = {semi_[0], semi_[1]};
      break;
  }
  return j;
}

double ConvexDomain::diameter() const {
  switch (kind_) {
    case DomainKind::interval: return hi_ - lo_;
    case DomainKind::disc: return 2.0 * semi_[0];
    case DomainKind::ellipse: return 2.0 * std::max(semi_[0], semi_[1]);
    case DomainKind::polygon: {
      double best = 0.0;
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
          best = std::max(best, distance(vertices_[i], vertices_[j]));
        }
      }
      return best;
    }
  }
  return 0.0;
}

Box ConvexDomain::bounds() const {
  switch (kind_) {
    case DomainKind::interval: return {{lo_, 0.0}, {hi_, 0.0}};
    case DomainKind::disc:
    case DomainKind::ellipse:
      return {{center_.x - semi_[0], center_.y - semi_[1]},
              {center_.x + semi_[0], center_.y + semi_[1]}};
    case DomainKind::polygon: {
      Box b{vertices_.front(), vertices_.front()};
      for (const Point& p : vertices_) {
        b.lo.x = std::min(b.lo.x, p.x);
        b.lo.y = std::min(b.lo.y, p.y);
        b.hi.x = std::max(b.hi.x, p.x);
        b.hi.y = std::max(b.hi.y, p.y);
      }
      return b;
    }
  }
  return {};
}

double ConvexDomain::area() const {
  switch (kind_) {
    case DomainKind::interval: return hi_ - lo_;
    case DomainKind::disc:
    case DomainKind::ellipse: return std::numbers::pi * semi_[0] * semi_[1];
    case DomainKind::polygon: {
      double twice = 0.0;
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point& p = vertices_[i];
        const Point& q = vertices_[(i + 1) % vertices_.size()];
        twice += p.x * q.y - q.x * p.y;
      }
      return 0.5 * twice;
    }
  }
  return 0.0;
}

bool ConvexDomain::contains(Point p) const {
  switch (kind_) {
    case DomainKind::interval: return lo_ < p.x && p.x < hi_;
    case DomainKind::disc: {
      const double dx = p.x - center_.x;
      const double dy = p.y - center_.y;
      return dx * dx + dy * dy < semi_[0] * semi_[0];
    }
    case DomainKind::ellipse: {
      const double dx = (p.x - center_.x) / semi_[0];
      const double dy = (p.y - center_.y) / semi_[1];
      return dx * dx + dy * dy < 1.0;
    }
    case DomainKind::polygon: {
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (cross(vertices_[i], vertices_[(i + 1) % n], p) <= 0.0) return false;
      }
      return true;
    }
  }
  return false;
}

double ConvexDomain::boundary_distance(Point p) const {
  if (!contains(p)) return 0.0;
  switch (kind_) {
    case DomainKind::interval: return std::min(p.x - lo_, hi_ - p.x);
    case DomainKind::disc: return semi_[0] - distance(p, center_);
    case DomainKind::ellipse: {
      double y0 = std::abs(p.x - center_.x);
      double y1 = std::abs(p.y - center_.y);
      double e0 = semi_[0];
      double e1 = semi_[1];
      if (e0 < e1) {
        std::swap(e0, e1);
        std::swap(y0, y1);
      }
      return ellipse_distance_quadrant(e0, e1, y0, y1);
    }
    case DomainKind::polygon: {
      double best = kInf;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % n];
        best = std::min(best, cross(a, b, p) / distance(a, b));
      }
      return std::max(best, 0.0);
    }
  }
  return 0.0;
}

double ConvexDomain::axis_distance(Point p, int axis, int direction) const {
  const double s = direction < 0 ? -1.0 : 1.0;
  switch (kind_) {
    case DomainKind::interval:
      if (axis != 0) return kInf;
      return s > 0 ? hi_ - p.x : p.x - lo_;
    case DomainKind::disc:
    case DomainKind::ellipse: {
      const double along = axis == 0 ? p.x - center_.x : p.y - center_.y;
      const double across = axis == 0 ? p.y - center_.y : p.x - center_.x;
      const double semi_along = semi_[static_cast<std::size_t>(axis)];
      const double semi_across = semi_[static_cast<std::size_t>(1 - axis)];
      const double q = across / semi_across;
      const double reach = semi_along * std::sqrt(std::max(0.0, 1.0 - q * q));
      return reach - s * along;
    }
    case DomainKind::polygon: {
      double best = kInf;
      const std::size_t n = vertices_.size();
      const double ex = axis == 0 ? s : 0.0;
      const double ey = axis == 1 ? s : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % n];
        // Outward normal of a counter-clockwise edge.
        const double nx = b.y - a.y;
        const double ny = a.x - b.x;
        const double dot = nx * ex + ny * ey;
        if (dot <= 0.0) continue;
        const double t = (nx * (a.x - p.x) + ny * (a.y - p.y)) / dot;
        best = std::min(best, t);
      }
      return best;
    }
  }
  return kInf;
}

bool ConvexDomain::rectangle_sides(double& side_a, double& side_b) const {
  if (kind_ != DomainKind::polygon || vertices_.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point& p = vertices_[i];
    const Point& q = vertices_[(i + 1) % 4];
    const Point& r = vertices_[(i + 2) % 4];
    const double dot = (q.x - p.x) * (r.x - q.x) + (q.y - p.y) * (r.y - q.y);
    if (std::abs(dot) > 1e-12 * distance(p, q) * distance(q, r)) return false;
  }
  side_a = distance(vertices_[0], vertices_[1]);
  side_b = distance(vertices_[1], vertices_[2]);
  return true;
}

ConvexDomain random_convex_polygon(std::uint64_t seed, std::size_t vertex_count, double semi_x,
                                   double semi_y, Point center) {
  if (vertex_count < 3) throw ConfigError("random polygon needs at least 3 vertices");
  Rng rng(seed);
  const double two_pi = 2.0 * std::numbers::pi;
  const double min_gap = 0.25 * two_pi / static_cast<double>(vertex_count);
  std::vector<double> angles(vertex_count);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (double& a : angles) a = rng.uniform(0.0, two_pi);
    std::sort(angles.begin(), angles.end());
    double smallest = angles.front() + two_pi - angles.back();
    for (std::size_t i = 1; i < vertex_count; ++i) {
      smallest = std::min(smallest, angles[i] - angles[i - 1]);
    }
    if (smallest >= min_gap) break;
  }
  std::vector<Point> vs;
  vs.reserve(vertex_count);
  for (double a : angles) {
    vs.push_back({center.x + semi_x * std::cos(a), center.y + semi_y * std::sin(a)});
  }
  return ConvexDomain::polygon(std::move(vs));
}

}  // namespace plc
