#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "plc/eigensolver.hpp"
#include "plc/envelope.hpp"
#include "plc/error.hpp"
#include "plc/random.hpp"
#include "plc/transforms.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace plc;

using test::chord_oracle;
using test::double_well;
using test::separable_wells;
using test::triangle_oracle;

TEST_CASE("convex input is its own envelope") {
  const auto f = sample(test::grid(test::unit_disc(), 1.0 / 16),
                        [](Point p) { return p.x * p.x + 2.0 * p.y * p.y + 0.3 * p.x; });
  const auto env = convex_envelope(f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!env.included()[k]) {
      CHECK(env.values()[k] == f[k]);
      continue;
    }
    CHECK(env.values()[k] == doctest::Approx(f[k]).epsilon(1e-10));
    CHECK(env.contact()[k] == 1);
  }
  const auto contact = contact_set(f, env, env.tolerance());
  CHECK(std::count(contact.begin(), contact.end(), 1) == static_cast<long>(env.included_count()));
}

TEST_CASE("double well envelope against the chord oracle") {
  const double h = 1.0 / 100;
  const auto f = double_well(h);
  const auto env = convex_envelope(f, 0.0);
  const auto oracle = chord_oracle(f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double x = f.mask->position(k).x;
    CHECK(std::abs(env.values()[k] - oracle[k]) <= 1e-9);
    if (std::abs(x) <= 1.0) {
      CHECK(std::abs(env.values()[k]) <= 1e-9);
    } else {
      CHECK(std::abs(env.values()[k] - f[k]) <= 1e-9);
    }
  }
  CHECK(std::abs(evaluate_envelope(env, {0.5, 0.0})) <= 1e-12);
  CHECK(std::abs(evaluate_envelope(env, {0.123, 0.0})) <= 1e-12);
  for (std::size_t k = 0; k < f.size(); k += 37) {
    CHECK(evaluate_envelope(env, f.mask->position(k)) == doctest::Approx(env.values()[k]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(evaluate_envelope(env, {2.5, 0.0}), DomainViolation);
}

TEST_CASE("double well contact set") {
  const double h = 1.0 / 100;
  const auto f = double_well(h);
  const auto env = convex_envelope(f, 0.0);
  const auto contact = contact_set(f, env, 8.0 * h * h);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double ax = std::abs(f.mask->position(k).x);
    if (ax >= 1.0 - h - 1e-12) CHECK(contact[k] == 1);
    if (ax < 1.0 - 3.0 * h) CHECK(contact[k] == 0);
  }
}

TEST_CASE("double well facet decompositions") {
  const auto f = double_well(1.0 / 100);
  const auto env = convex_envelope(f, 0.0);

  const auto at_contact = facet_decomposition(env, {1.5, 0.0});
  CHECK(at_contact.weights == std::vector<double>{1.0});
  CHECK(at_contact.points[0].x == doctest::Approx(1.5).epsilon(1e-14));

  const auto mid = facet_decomposition(env, {0.0, 0.0});
  REQUIRE(mid.weights.size() == 2);
  CHECK(mid.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid.points[0].x == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(mid.points[1].x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mid.p[0]) <= 1e-12);

  const auto quarter = facet_decomposition(env, {0.5, 0.0});
  REQUIRE(quarter.weights.size() == 2);
  CHECK(quarter.weights[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(quarter.weights[1] == doctest::Approx(0.75).epsilon(1e-12));
  double x = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    x += quarter.weights[i] * quarter.points[i].x;
    value += quarter.weights[i] * f[quarter.nodes[i]];
  }
  CHECK(x == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(value - evaluate_envelope(env, {0.5, 0.0})) <= 1e-10);
  CHECK(std::abs(quarter.p[0]) <= 1e-12);
}

TEST_CASE("strictly concave input touches only the extreme nodes") {
  const auto f = sample(test::grid(test::unit_interval(), 1.0 / 50), [](Point p) { return -p.x * p.x; });
  const auto env = convex_envelope(f, 0.0);
  const auto contact = contact_set(f, env, 1e-12);
  CHECK(contact.front() == 1);
  CHECK(contact.back() == 1);
  CHECK(std::count(contact.begin(), contact.end(), 1) == 2);
  CHECK(env.facets().size() == 1);
}

TEST_CASE("midpoint of two contact nodes averages their values") {
  const auto f = sample(test::grid(test::unit_square(), 1.0 / 16),
                        [](Point p) { return std::exp(p.x) + p.y * p.y; });
  const auto env = convex_envelope(f, 0.0);
  const auto& facet = env.facets().at(env.facets().size() / 2);
  const Point a = f.mask->position(facet.vertices[0]);
  const Point b = f.mask->position(facet.vertices[1]);
  CHECK(evaluate_envelope(env, {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}) ==
        doctest::Approx(0.5 * (f[facet.vertices[0]] + f[facet.vertices[1]])).epsilon(1e-12));
}

TEST_CASE("2D envelope matches the triangle brute force") {
  // 15x15 nodes here; the acceptance run uses 21x21.
  const auto f = separable_wells(0.4, 0.1, 0.8);
  REQUIRE(f.size() == 15 * 15);
  const auto env = convex_envelope(f, 0.0);
  const auto oracle = triangle_oracle(f);
  double worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, std::abs(env.values()[k] - oracle[k]));
  CHECK(worst <= 1e-9);

  for (std::size_t k = 0; k < f.size(); ++k) {
    const Point x = f.mask->position(k);
    if (std::abs(x.x) >= 0.7 || std::abs(x.y) >= 0.7) continue;
    const auto d = facet_decomposition(env, x);
    REQUIRE(!d.weights.empty());
    CHECK(d.weights.size() <= 3);
    double sum = 0.0;
    double px = 0.0;
    double py = 0.0;
    double value = 0.0;
    for (std::size_t i = 0; i < d.weights.size(); ++i) {
      CHECK(d.weights[i] > 0.0);
      sum += d.weights[i];
      px += d.weights[i] * d.points[i].x;
      py += d.weights[i] * d.points[i].y;
      value += d.weights[i] * f[d.nodes[i]];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(px - x.x) <= 1e-10);
    CHECK(std::abs(py - x.y) <= 1e-10);
    CHECK(std::abs(value - env.values()[k]) <= 1e-10);
  }
}

TEST_CASE("envelope invariants on a nonconvex field") {
  const auto f = sample(test::grid(test::unit_disc(), 1.0 / 16), [](Point p) {
    return std::cos(3.0 * p.x) * std::sin(2.0 * p.y) + p.x * p.x;
  });
  const auto env = convex_envelope(f);
  const auto& ev = env.values();
  const double scale = 1.0 + std::abs(*std::max_element(f.values.begin(), f.values.end()));
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(ev[k] <= f[k] + 1e-12);

  // Second differences along grid lines, among included nodes.
  const auto& m = *f.mask;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!env.included()[k]) continue;
    for (int axis = 0; axis < 2; ++axis) {
      const auto lo = m.neighbour(k, 2 * axis);
      const auto hi = m.neighbour(k, 2 * axis + 1);
      if (lo < 0 || hi < 0) continue;
      if (!env.included()[static_cast<std::size_t>(lo)] || !env.included()[static_cast<std::size_t>(hi)]) continue;
      CHECK(ev[static_cast<std::size_t>(lo)] + ev[static_cast<std::size_t>(hi)] - 2.0 * ev[k] >= -1e-9 * scale);
    }
  }
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (env.included()[k] && !env.contact()[k]) CHECK(env.facet_of_node(k) >= 0);
  }

  // Idempotence.
  const auto again = convex_envelope(ev, env.exclusion_band());
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(again.values()[k] - ev[k]) <= 1e-10);

  // No random Caratheodory triple beats the envelope at a node it contains.
  Rng rng(5);
  std::vector<std::size_t> inc;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (env.included()[k]) inc.push_back(k);
  }
  std::size_t violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t a = inc[rng.index(inc.size())];
    const std::size_t b = inc[rng.index(inc.size())];
    const std::size_t c = inc[rng.index(inc.size())];
    const auto la = m.lattice(a);
    const auto lb = m.lattice(b);
    const auto lc = m.lattice(c);
    const std::int64_t det = (lb[0] - la[0]) * (lc[1] - la[1]) - (lb[1] - la[1]) * (lc[0] - la[0]);
    if (det == 0) continue;
    for (std::size_t q : inc) {
      const auto l = m.lattice(q);
      const double ta = static_cast<double>((lb[0] - l[0]) * (lc[1] - l[1]) - (lb[1] - l[1]) * (lc[0] - l[0])) / det;
      const double tb = static_cast<double>((lc[0] - l[0]) * (la[1] - l[1]) - (lc[1] - l[1]) * (la[0] - l[0])) / det;
      const double tc = 1.0 - ta - tb;
      if (ta < 0 || tb < 0 || tc < -1e-15) continue;
      if (ta * f[a] + tb * f[b] + tc * f[c] < ev[q] - 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("envelope of w_kappa grows toward the boundary") {
  const auto r = smallest_eigenpair(test::unit_disc(), 1.0 / 64);
  const auto w = w_field(r.u, 0.5);
  const auto env = convex_envelope(w, 0.0);
  double previous = 0.0;
  for (double delta : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    double lowest = 1e300;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double d = r.u.mask->boundary_distance(k);
      if (d >= delta && d < 2.0 * delta) lowest = std::min(lowest, env.values()[k]);
    }
    CHECK(lowest > previous);
    previous = lowest;
  }
}

TEST_CASE("facet gradients match the source gradient at facet vertices") {
  const auto f = separable_wells(0.4, 0.05, 0.8);
  const auto env = convex_envelope(f, 0.0);
  const auto g = gradient(f);
  const double h = f.mask->h();
  const double m2 = 2.0;  // Hessian norm of the source off the valley
  std::size_t spanning = 0;
  for (const auto& facet : env.facets()) {
    const double x0 = f.mask->position(facet.vertices[0]).x;
    const double x1 = f.mask->position(facet.vertices[1]).x;
    const double x2 = f.mask->position(facet.vertices[2]).x;
    if (std::max({x0, x1, x2}) - std::min({x0, x1, x2}) < 0.5) continue;  // only facets across the wells
    ++spanning;
    for (int r = 0; r < 3; ++r) {
      const std::size_t k = facet.vertices[static_cast<std::size_t>(r)];
      if (!f.mask->full_stencil(k)) continue;
      CHECK(std::abs(g[k][0] - facet.p[0]) <= 2.0 * h * m2);
      CHECK(std::abs(g[k][1] - facet.p[1]) <= 2.0 * h * m2);
    }
  }
  CHECK(spanning > 0);
}

TEST_CASE("envelope errors and export") {
  const auto tiny = sample(test::grid(test::unit_square(), 0.25), [](Point p) { return p.x; });
  CHECK_THROWS_AS(convex_envelope(tiny, 0.3), ConfigError);
  CHECK_THROWS_AS(convex_envelope(tiny, -1.0), ConfigError);

  const auto f = double_well(0.25);
  const auto env = convex_envelope(f, 0.0);
  std::ostringstream os;
  write_facet_csv(os, env);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "facet_id,v0,v1,p_x,offset");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == env.facets().size());

  const auto sq = sample(test::grid(test::unit_square(), 0.25), [](Point p) { return p.x * p.x + p.y; });
  std::ostringstream os2;
  write_facet_csv(os2, convex_envelope(sq, 0.0));
  CHECK(os2.str().rfind("facet_id,v0,v1,v2,p_x,p_y,offset\n", 0) == 0);
}
