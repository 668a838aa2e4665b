#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "plc/eigensolver.hpp"
#include "plc/error.hpp"
#include "plc/random.hpp"
#include "plc/transforms.hpp"
#include "plc/verify.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace plc;
using plc::test::pi;
using test::two_bumps_1d;
using test::two_bumps_2d;
using test::two_facet_field;

namespace {

SamplerConfig sampler(std::size_t pairs, std::uint64_t seed = 42) {
  SamplerConfig s;
  s.pair_count = pairs;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("CheckResult JSON and pass rule") {
  CheckResult r;
  r.name = "x";
  r.worst_violation = 1.0;
  r.tolerance = 1.0;
  r.finish();
  CHECK(r.pass);
  r.worst_violation = 1.0 + 1e-15;
  r.finish();
  CHECK_FALSE(r.pass);
  const auto j = r.to_json();
  for (const char* key : {"name", "pass", "worst_violation", "tolerance", "samples", "worst_location"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("sampler validation") {
  SamplerConfig s;
  s.pair_count = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.pair_count = 1;
  s.t_values = {0.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.t_values = {0.25, 0.5};
  CHECK_NOTHROW(s.validate());
  const auto u = test::sine_1d(1.0 / 16);
  SamplerConfig wide;
  wide.band = 0.6;
  CHECK_THROWS_AS(segment_concavity_check(u, ConcavityParams(0.5, 0.5), wide), GridTooCoarse);
  CHECK_THROWS_AS(li_yau_check(u, pi * pi, 0.6), GridTooCoarse);
}

TEST_CASE("sine is (1/2)-logconcave at kappa 0.99 on a million triples") {
  Rng rng(1);
  double worst = -1e300;
  for (int i = 0; i < 1000000; ++i) {
    const double x = rng.uniform(1e-3, 1.0 - 1e-3);
    const double y = rng.uniform(1e-3, 1.0 - 1e-3);
    const double t = rng.uniform();
    const double z = (1.0 - t) * x + t * y;
    worst = std::max(worst, -concavity_margin(0.5, 0.99, std::sin(pi * x), std::sin(pi * y), std::sin(pi * z), t));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("segment concavity check") {
  const auto u = test::sine_1d(1.0 / 256);
  const auto r = segment_concavity_check(u, ConcavityParams(0.5, 0.99), sampler(20000));
  CHECK(r.pass);
  CHECK(r.samples == 20000);

  const auto disc = smallest_eigenpair(test::unit_disc(), 1.0 / 32);
  CHECK(segment_concavity_check(disc.u, ConcavityParams(1.0, 1.0), sampler(5000)).pass);

  const auto bumps = two_bumps_1d(1.0 / 256);
  const auto bad = segment_concavity_check(bumps, ConcavityParams(0.5, 0.5), sampler(20000));
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.worst_location.size() == 2);
  const double xa = bumps.mask->position(static_cast<std::size_t>(bad.worst_location[0])).x;
  const double xb = bumps.mask->position(static_cast<std::size_t>(bad.worst_location[1])).x;
  CHECK(std::min(xa, xb) < 0.5);
  CHECK(std::max(xa, xb) > 0.5);
}

TEST_CASE("segment check at node midpoints agrees with node arithmetic") {
  const auto u = test::sine_1d(1.0 / 64);
  // Nodes i and i + 2m have node i + m as exact midpoint.
  for (std::size_t i = 5; i + 20 < u.size(); i += 7) {
    const auto mid = u.interpolate(u.mask->position(i + 10));
    REQUIRE(mid);
    CHECK(*mid == doctest::Approx(u[i + 10]).epsilon(1e-14));
    const double direct = concavity_margin(0.5, 0.9, u[i], u[i + 20], u[i + 10], 0.5);
    const double interp = concavity_margin(0.5, 0.9, u[i], u[i + 20], *mid, 0.5);
    CHECK(std::abs(direct - interp) <= 1e-12);
  }
}

TEST_CASE("checks are deterministic") {
  const auto u = smallest_eigenpair(test::unit_square(), 1.0 / 32).u;
  const auto a = segment_concavity_check(u, ConcavityParams(0.5, 0.2), sampler(3000, 9)).to_json();
  const auto b = segment_concavity_check(u, ConcavityParams(0.5, 0.2), sampler(3000, 9)).to_json();
  CHECK(a.dump() == b.dump());
  const auto c = segment_concavity_check(u, ConcavityParams(0.5, 0.2), sampler(3000, 10)).to_json();
  CHECK(a.dump() != c.dump());
  CHECK(trace_concavity_property(3, 500).to_json().dump() == trace_concavity_property(3, 500).to_json().dump());
}

TEST_CASE("hessian convexity check") {
  const auto sq = test::sine_2d(1.0 / 64);
  CHECK(hessian_convexity_check(w_field(sq, 1.0)).pass);

  const auto well = sample(test::grid(test::unit_square(), 1.0 / 32), [](Point p) {
    const double s = (2.0 * p.x - 1.0) * (2.0 * p.x - 1.0) - 0.25;
    return s * s + p.y;
  });
  const auto bad = hessian_convexity_check(well);
  CHECK_FALSE(bad.pass);
  const double x = well.mask->position(static_cast<std::size_t>(bad.worst_location[0])).x;
  CHECK(std::abs(x - 0.5) < 0.1);  // at the hump

  const auto affine = sample(test::grid(test::unit_disc(), 1.0 / 16), [](Point p) { return 2.0 * p.x - p.y + 3.0; });
  const auto flat = hessian_convexity_check(affine);
  CHECK(flat.pass);
  CHECK(std::abs(flat.worst_violation) <= 1e-10);
}

TEST_CASE("Andrews-Clutterbuck modulus on the analytic sine") {
  // v = -log sin(pi x), v' = -pi cot(pi x).
  auto at = [](double x) { return PointSample{{x, 0.0}, std::sin(pi * x), {pi * std::cos(pi * x), 0.0}}; };
  std::vector<std::pair<PointSample, PointSample>> symmetric;
  for (double d = 0.01; d < 0.49; d += 0.01) symmetric.emplace_back(at(0.5 - d), at(0.5 + d));
  const auto eq = ac_modulus_check(symmetric, 1.0, 1e-10);
  CHECK(eq.pass);
  CHECK(std::abs(eq.worst_violation) <= 1e-10);
  CHECK(std::abs(eq.details["least_violation"].get<double>()) <= 1e-10);

  std::vector<std::pair<PointSample, PointSample>> generic;
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(0.01, 0.99);
    const double b = rng.uniform(0.01, 0.99);
    if (std::abs(a + b - 1.0) < 1e-3 || std::abs(a - b) < 1e-3 || std::abs(a - b) > 0.8) continue;
    generic.emplace_back(at(a), at(b));
  }
  const auto strict = ac_modulus_check(generic, 1.0, 0.0);
  CHECK(strict.pass);
  CHECK(strict.worst_violation < 0.0);

  // An understated diameter makes the modulus too strong.
  CHECK_FALSE(ac_modulus_check(generic, 0.9, 1e-10).pass);
}

TEST_CASE("Andrews-Clutterbuck modulus on grids") {
  const auto u = test::sine_1d(1.0 / 256);
  CHECK(ac_modulus_check(u, 1.0, sampler(20000)).pass);
  const auto disc = smallest_eigenpair(test::unit_disc(), 1.0 / 64);
  CHECK(ac_modulus_check(disc.u, 2.0, sampler(20000)).pass);
  CHECK_FALSE(ac_modulus_check(two_bumps_1d(1.0 / 256), 1.0, sampler(20000)).pass);
}

TEST_CASE("Li-Yau bound") {
  std::vector<PointSample> samples;
  for (double x = 0.001; x < 1.0; x += 0.001) {
    samples.push_back({{x, 0.0}, std::sin(pi * x), {pi * std::cos(pi * x), 0.0}});
  }
  const auto eq = li_yau_check(samples, pi * pi, 1e-12);
  CHECK(eq.pass);
  CHECK(std::abs(eq.worst_violation) <= 1e-12);
  CHECK(std::abs(eq.details["least_violation"].get<double>()) <= 1e-12);
  CHECK_FALSE(li_yau_check(samples, pi * pi / 4.0, 1e-12).pass);

  const auto sq = smallest_eigenpair(test::unit_square(), 1.0 / 64);
  const auto r = li_yau_check(sq.u, sq.lambda1);
  CHECK(r.pass);
  CHECK(std::abs(r.worst_violation) <= 1e-2 * sq.lambda1);
  CHECK_FALSE(li_yau_check(sq.u, sq.lambda1 / 4.0).pass);
}

TEST_CASE("PDE residual of w_kappa") {
  const auto u1 = test::sine_1d(1.0 / 128);
  const auto u2 = test::sine_1d(1.0 / 256);
  const auto r1 = pde_residual_check(w_field(u1, 0.5), pi * pi);
  const auto r2 = pde_residual_check(w_field(u2, 0.5), pi * pi);
  CHECK(r2.worst_violation <= 1e-2);
  CHECK(r2.pass);
  CHECK(r1.pass);
  const double ratio = r1.worst_violation / r2.worst_violation;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);

  // A constant w leaves exactly the lambda / (2 w) term.
  const auto mask = test::grid(test::unit_square(), 1.0 / 32);
  const auto constant = sample(mask, [](Point) { return 2.0; });
  const auto c = pde_residual_check(constant, 10.0);
  CHECK(c.worst_violation == doctest::Approx(10.0 / 4.0).epsilon(1e-12));
  CHECK(c.details["max_abs_residual"].get<double>() == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_FALSE(c.pass);

  const auto zero = sample(mask, [](Point p) { return std::abs(p.x - 0.5); });
  CHECK_THROWS_AS(pde_residual_check(zero, 10.0), DomainViolation);
}

TEST_CASE("envelope gradient detector") {
  const double bound_slope = pi / std::sqrt(2.0);  // D = 1
  const auto weak = two_facet_field(pi / 2.0, 1.0 / 200);
  const auto weak_result = envelope_gradient_check(weak, convex_envelope(weak, 0.0), 1.0);
  CHECK_FALSE(weak_result.vacuous);
  CHECK_FALSE(weak_result.pass);

  const auto steep = two_facet_field(3.0, 1.0 / 200);
  REQUIRE(3.0 > bound_slope);
  const auto steep_result = envelope_gradient_check(steep, convex_envelope(steep, 0.0), 1.0);
  CHECK_FALSE(steep_result.vacuous);
  CHECK(steep_result.pass);
  CHECK(steep_result.details["gap_nodes"].get<std::size_t>() > 0);

  const auto sq = smallest_eigenpair(test::unit_square(), 1.0 / 64);
  const auto w = w_field(sq.u, kappa_bar(sq.lambda1, std::sqrt(2.0)));
  const auto vac = envelope_gradient_check(w, convex_envelope(w), std::sqrt(2.0));
  CHECK(vac.pass);
  CHECK(vac.vacuous);
}

TEST_CASE("subsolution, Lipschitz and Rayleigh checks") {
  const auto sq = smallest_eigenpair(test::unit_square(), 1.0 / 64);
  const double kappa = kappa_bar(sq.lambda1, std::sqrt(2.0));
  const auto env = convex_envelope(w_field(sq.u, kappa));
  const auto uk = reconstruct_u_kappa(env.values(), kappa);
  CHECK(*std::max_element(uk.values.begin(), uk.values.end()) == 1.0);
  const auto sub = subsolution_check(uk, sq.lambda1);
  CHECK(sub.pass);
  CHECK(std::abs(sub.worst_violation) <= 1e-6 * sq.lambda1);
  CHECK(lipschitz_check(uk, sq.lambda1).pass);
  const auto ray = rayleigh_check(uk, sq.lambda1);
  CHECK(ray.pass);
  CHECK(std::abs(ray.worst_violation) <= 1e-2);

  const auto s = test::sine_1d(1.0 / 256);
  CHECK(lipschitz_check(s, pi * pi).pass);
  CHECK(rayleigh_check(s, pi * pi).pass);
  CHECK_FALSE(subsolution_check(s, pi * pi / 2.0).pass);
  CHECK_FALSE(lipschitz_check(s, pi * pi / 4.0).pass);
  CHECK_FALSE(rayleigh_check(s, pi * pi / 2.0).pass);
}

TEST_CASE("discrete Dirichlet energy of the sine") {
  const auto s = test::sine_1d(1.0 / 512);
  CHECK(dirichlet_energy(s) == doctest::Approx(pi * pi / 2.0).epsilon(1e-4));
  CHECK(l2_mass(s) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("locality check") {
  const auto disc = smallest_eigenpair(test::unit_disc(), 1.0 / 32);
  std::size_t previous = disc.u.size() + 1;
  for (double kappa : {0.3, 0.5, 0.7}) {
    const auto env = convex_envelope(w_field(disc.u, kappa));
    const auto r = locality_check(disc.u, env, kappa, disc.lambda1, 2.0, sampler(20000));
    CHECK(r.pass);
    const auto count = r.details["omega_nodes"].get<std::size_t>();
    CHECK(count < previous);
    previous = count;
  }

  const auto bumps = two_bumps_2d(1.0 / 64);
  const double lambda = 2.0 * pi * pi;
  const auto env = convex_envelope(w_field(bumps, 0.5));
  const auto bad = locality_check(bumps, env, 0.5, lambda, std::sqrt(2.0), sampler(20000));
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.details["discretely_convex"].get<bool>());
}

TEST_CASE("alpha and kappa monotonicity") {
  const auto sq = smallest_eigenpair(test::unit_square(), 1.0 / 32);
  const double kb = kappa_bar(sq.lambda1, std::sqrt(2.0));
  std::vector<std::pair<double, double>> alphas{{0.5, 0.75}, {0.5, 0.5}, {0.5, 1.0}};
  std::vector<std::pair<double, double>> kappas{{kb, kb / 2.0}, {0.9, 0.3}};
  const auto r = alpha_kappa_monotonicity(sq.u, sampler(1000), alphas, kappas, kb, 0.5);
  CHECK(r.pass);
  CHECK(r.details["premises_holding"].get<std::size_t>() > 0);

  // log-concave but not (1/4)-logconcave: the reversed pair must fail.
  const auto gauss = sample(test::grid(test::unit_interval(), 1.0 / 128),
                            [](Point p) { return std::exp(-(p.x - 0.5) * (p.x - 0.5) / 0.05); });
  std::vector<std::pair<double, double>> reversed{{1.0, 0.25}};
  std::vector<std::pair<double, double>> none;
  const auto bad = alpha_kappa_monotonicity(gauss, sampler(1000), reversed, none, 1.0, 0.5);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("trace functional") {
  const std::vector<double> identity{1, 0, 0, 1};
  CHECK(trace_functional(identity, 2, TraceFunctional::reciprocal_inverse_trace) == doctest::Approx(0.5));
  const std::vector<double> a{1, 0, 0, 2};
  const std::vector<double> b{2, 0, 0, 1};
  const std::vector<double> m{1.5, 0, 0, 1.5};
  const double fa = trace_functional(a, 2, TraceFunctional::reciprocal_inverse_trace);
  const double fb = trace_functional(b, 2, TraceFunctional::reciprocal_inverse_trace);
  const double fm = trace_functional(m, 2, TraceFunctional::reciprocal_inverse_trace);
  CHECK(fm == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(fa == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(fm >= 0.5 * (fa + fb));
  CHECK_THROWS_AS(trace_functional({1, 0, 0, -1}, 2, TraceFunctional::inverse_trace), DomainViolation);

  const auto r = trace_concavity_property(42, 10000);
  CHECK(r.pass);
  CHECK(r.samples == 10000);
  CHECK_FALSE(trace_concavity_property(42, 1000, 2, 6, TraceFunctional::inverse_trace).pass);
}

TEST_CASE("kappa sweep") {
  const auto sq = smallest_eigenpair(test::unit_square(), 1.0 / 32);
  const auto sweep = kappa_sweep(sq.u, kappa_bar(sq.lambda1, std::sqrt(2.0)), std::nullopt, 4);
  CHECK(sweep.threshold == 1.0 - 1e-6);
  CHECK(sweep.steps.size() == 2);
  CHECK(sweep.steps[0].pass);

  const auto iv = smallest_eigenpair(test::unit_interval(), 1.0 / 64);
  const auto one = kappa_sweep(iv.u, 1.0, std::nullopt, 4);
  CHECK(one.steps.size() == 1);
  CHECK(one.threshold == 1.0 - 1e-6);
}
