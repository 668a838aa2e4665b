#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "plc/lower_hull.hpp"
#include "plc/random.hpp"

using namespace plc;
using plc::hull::LatticePoint;

namespace {

std::int64_t twice_area(const std::vector<LatticePoint>& p, const std::array<int, 3>& f) {
  const auto& a = p[static_cast<std::size_t>(f[0])];
  const auto& b = p[static_cast<std::size_t>(f[1])];
  const auto& c = p[static_cast<std::size_t>(f[2])];
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Twice the area of the planar convex hull, by monotone chain.
std::int64_t twice_hull_area(std::vector<LatticePoint> p) {
  std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  auto cross = [](const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<LatticePoint> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  std::int64_t area = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) area += h[i].x * h[i + 1].y - h[i + 1].x * h[i].y;
  return area;
}

// Every point lies on or above the plane of each facet (checked in long
// double, with a relative slack for the rounding of the plane itself).
void check_lower(const std::vector<LatticePoint>& p, const std::vector<std::array<int, 3>>& facets) {
  for (const auto& f : facets) {
    const auto& a = p[static_cast<std::size_t>(f[0])];
    const auto& b = p[static_cast<std::size_t>(f[1])];
    const auto& c = p[static_cast<std::size_t>(f[2])];
    const long double det = static_cast<long double>(twice_area(p, f));
    REQUIRE(det > 0);
    for (const auto& q : p) {
      // Barycentric affine interpolation of the facet plane at q.
      const long double la = ((b.x - q.x) * (long double)(c.y - q.y) - (b.y - q.y) * (long double)(c.x - q.x)) / det;
      const long double lb = ((c.x - q.x) * (long double)(a.y - q.y) - (c.y - q.y) * (long double)(a.x - q.x)) / det;
      const long double lc = 1.0L - la - lb;
      const long double plane = la * a.z + lb * b.z + lc * c.z;
      CHECK(static_cast<double>(q.z - plane) >= -1e-9 * (1.0 + std::abs(q.z)));
    }
  }
}

}  // namespace

TEST_CASE("exact sign of sums") {
  const std::vector<std::int64_t> c{1, 1, -1};
  const std::vector<double> z{1e16, 1.0, 1e16};
  CHECK(hull::sign_of_sum(c, z) == 1);  // naive evaluation gives 0
  const std::vector<std::int64_t> c2{3, -1};
  const std::vector<double> z2{0.1, 0.30000000000000004};
  CHECK(hull::sign_of_sum(c2, z2) == -1);
  const std::vector<std::int64_t> c3{2, -1};
  const std::vector<double> z3{0.5, 1.0};
  CHECK(hull::sign_of_sum(c3, z3) == 0);
}

TEST_CASE("orientation predicates") {
  const LatticePoint a{0, 0, 0.0};
  const LatticePoint b{1, 0, 0.0};
  const LatticePoint c{0, 1, 0.0};
  CHECK(hull::orient2d(a, b, c) == 1);
  CHECK(hull::orient2d(a, c, b) == -1);
  CHECK(hull::orient2d(a, b, LatticePoint{2, 0, 5.0}) == 0);

  // Four coplanar points: the perturbed sign is nonzero and antisymmetric.
  const std::vector<LatticePoint> pts{{0, 0, 0.0}, {1, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}};
  const int s = hull::orient3d(pts, 0, 1, 2, 3);
  CHECK(s != 0);
  CHECK(hull::orient3d(pts, 1, 0, 2, 3) == -s);
  CHECK(hull::orient3d(pts, 0, 2, 1, 3) == -s);
  CHECK(hull::orient3d(pts, 0, 1, 2, 3) == s);

  const std::vector<LatticePoint> tet{{0, 0, 0.0}, {1, 0, 0.0}, {0, 1, 0.0}, {0, 0, 1.0}};
  CHECK(hull::orient3d(tet, 0, 1, 2, 3) == -hull::orient3d(tet, 0, 2, 1, 3));
}

TEST_CASE("lower hull of a lattice paraboloid") {
  // Every 2x2 cell is cocircular: the worst degeneracy for the predicates.
  std::vector<LatticePoint> pts;
  for (int j = 0; j < 12; ++j) {
    for (int i = 0; i < 12; ++i) pts.push_back({i, j, static_cast<double>(i * i + j * j)});
  }
  const auto facets = hull::lower_hull_2d(pts);
  std::int64_t area = 0;
  for (const auto& f : facets) area += twice_area(pts, f);
  CHECK(area == 2 * 11 * 11);
  CHECK(facets.size() == 2 * 11 * 11);
  check_lower(pts, facets);
  CHECK(hull::lower_hull_2d(pts) == facets);
  CHECK(hull::lower_hull_2d(pts, 7) != std::vector<std::array<int, 3>>{});
}

TEST_CASE("lower hull of a flat lattice") {
  std::vector<LatticePoint> pts;
  for (int j = 0; j < 6; ++j) {
    for (int i = 0; i < 9; ++i) pts.push_back({i, j, 2.5});
  }
  const auto facets = hull::lower_hull_2d(pts);
  std::int64_t area = 0;
  for (const auto& f : facets) area += twice_area(pts, f);
  CHECK(area == 2 * 8 * 5);
}

TEST_CASE("lower hull of random point sets covers the planar hull") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LatticePoint> pts;
    const int n = 10 + trial * 7;
    for (int i = 0; i < n; ++i) {
      const auto x = static_cast<std::int64_t>(rng.index(25));
      const auto y = static_cast<std::int64_t>(rng.index(25));
      const bool dup = std::any_of(pts.begin(), pts.end(), [&](const auto& p) { return p.x == x && p.y == y; });
      if (!dup) pts.push_back({x, y, trial % 3 == 0 ? std::round(rng.uniform(0, 4)) : rng.normal()});
    }
    const auto facets = hull::lower_hull_2d(pts);
    std::int64_t area = 0;
    for (const auto& f : facets) area += twice_area(pts, f);
    CHECK(area == twice_hull_area(pts));
    check_lower(pts, facets);
  }
}

TEST_CASE("one-dimensional lower hull") {
  const std::vector<std::int64_t> x{0, 1, 2, 3, 4};
  const std::vector<double> convex{4, 1, 0, 1, 4};
  CHECK(hull::lower_hull_1d(x, convex) == std::vector<int>{0, 1, 2, 3, 4});
  const std::vector<double> concave{0, 3, 4, 3, 0};
  CHECK(hull::lower_hull_1d(x, concave) == std::vector<int>{0, 4});
  const std::vector<double> line{0, 1, 2, 3, 4};
  CHECK(hull::lower_hull_1d(x, line) == std::vector<int>{0, 4});
  const std::vector<double> well{1, 0, 1, 0, 1};
  CHECK(hull::lower_hull_1d(x, well) == std::vector<int>{0, 1, 3, 4});
}
