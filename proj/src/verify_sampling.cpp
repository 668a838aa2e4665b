#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "plc/eigensolver.hpp"
#include "verify_detail.hpp"

namespace plc {

nlohmann::json CheckResult::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["pass"] = pass;
  j["worst_violation"] = worst_violation;
  j["tolerance"] = tolerance;
  j["samples"] = samples;
  j["worst_location"] = worst_location;
  j["vacuous"] = vacuous;
  j["details"] = details;
  return j;
}

double SamplerConfig::band_for(const GridMask& mask) const {
  return band ? *band : default_check_band(mask);
}

void SamplerConfig::validate() const {
  if (pair_count == 0) throw ConfigError("pair_count must be at least 1");
  if (t_values.empty()) throw ConfigError("t_values must not be empty");
  for (double t : t_values) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("t value " + std::to_string(t) + " outside (0, 1)");
  }
  if (band && !(*band >= 0.0)) throw ConfigError("band must be nonnegative");
}

double concavity_margin(double alpha, double kappa, double ux, double uy, double ut, double t) {
  return l_alpha(alpha, kappa * ut) - (1.0 - t) * l_alpha(alpha, kappa * ux) -
         t * l_alpha(alpha, kappa * uy);
}

CheckResult segment_concavity_check(const GridField& u, const ConcavityParams& params,
                                    const SamplerConfig& sampler) {
  sampler.validate();
  const GridMask& mask = *u.mask;
  const double band = sampler.band_for(mask);
  const auto nodes = detail::check_nodes(mask, band, false);
  if (nodes.size() < 2) throw GridTooCoarse("segment check needs two nodes in the band");
  const double alpha = params.alpha();
  const double kappa = params.kappa();

  CheckResult r;
  r.name = "segment_concavity";
  r.worst_violation = -std::numeric_limits<double>::infinity();
  Rng rng(sampler.seed);
  double slope = 0.0;  // max |dL/du| at the interpolated points
  std::size_t skipped = 0;
  for (std::size_t s = 0; s < sampler.pair_count; ++s) {
    const auto [a, b] = detail::draw_pair(rng, nodes);
    const Point xa = mask.position(a);
    const Point xb = mask.position(b);
    for (double t : sampler.t_values) {
      const auto ut = u.interpolate(detail::lerp(xa, xb, t));
      if (!ut || !(*ut > 0.0)) {
        ++skipped;
        continue;
      }
      const double violation = -concavity_margin(alpha, kappa, u[a], u[b], *ut, t);
      const double ku = kappa * *ut;
      const double dl = ku < 1.0 ? alpha * std::pow(-std::log(ku), alpha - 1.0) / *ut : 0.0;
      slope = std::max(slope, dl);
      ++r.samples;
      if (violation > r.worst_violation) {
        r.worst_violation = violation;
        r.worst_location = {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)};
        r.details["worst_t"] = t;
      }
    }
  }
  if (r.samples == 0) throw GridTooCoarse("segment check: no admissible sample");
  const double h = mask.h();
  const double m2 = detail::max_hessian_norm(u, nodes);
  const double c = mask.dimension() == 1 ? 0.125 : 0.25;
  r.tolerance = c * h * h * m2 * slope + 1e-12;
  r.details["alpha"] = alpha;
  r.details["kappa"] = kappa;
  r.details["band"] = band;
  r.details["h"] = h;
  r.details["M2_u"] = m2;
  r.details["max_dL_du"] = slope;
  r.details["skipped"] = skipped;
  r.details["seed"] = sampler.seed;
  r.finish();
  return r;
}

namespace {

double ac_violation(Point y, Vec2 gy, Point z, Vec2 gz, double diameter) {
  const double dx = z.x - y.x;
  const double dy = z.y - y.y;
  const double dist = std::hypot(dx, dy);
  const double lhs = ((gz[0] - gy[0]) * dx + (gz[1] - gy[1]) * dy) / dist;
  const double rhs = 2.0 * std::numbers::pi / diameter *
                     std::tan(std::numbers::pi * dist / (2.0 * diameter));
  return rhs - lhs;
}

}  // namespace

CheckResult ac_modulus_check(const GridField& u, double diameter, const SamplerConfig& sampler) {
  sampler.validate();
  const GridMask& mask = *u.mask;
  const double band = sampler.band_for(mask);
  const auto nodes = detail::check_nodes(mask, band, false);
  if (nodes.size() < 2) throw GridTooCoarse("ac_modulus check needs two nodes in the band");
  const auto grad_u = gradient(u);
  std::vector<Vec2> grad_v(u.size());
  double max_grad = 0.0;
  for (std::size_t k : nodes) {
    if (!(u[k] > 0.0)) throw DomainViolation("ac_modulus check: u must be positive in the band");
    grad_v[k] = {-grad_u[k][0] / u[k], -grad_u[k][1] / u[k]};
    max_grad = std::max(max_grad, std::hypot(grad_v[k][0], grad_v[k][1]));
  }
  CheckResult r;
  r.name = "ac_modulus";
  r.worst_violation = -std::numeric_limits<double>::infinity();
  Rng rng(sampler.seed);
  for (std::size_t s = 0; s < sampler.pair_count; ++s) {
    const auto [a, b] = detail::draw_pair(rng, nodes);
    const double v = ac_violation(mask.position(a), grad_v[a], mask.position(b), grad_v[b], diameter);
    ++r.samples;
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.worst_location = {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)};
    }
  }
  r.tolerance = 10.0 * mask.h() * max_grad;
  r.details["band"] = band;
  r.details["h"] = mask.h();
  r.details["max_grad_v"] = max_grad;
  r.details["diameter"] = diameter;
  r.details["seed"] = sampler.seed;
  r.finish();
  return r;
}

CheckResult ac_modulus_check(std::span<const std::pair<PointSample, PointSample>> pairs,
                             double diameter, double tolerance) {
  CheckResult r;
  r.name = "ac_modulus";
  r.tolerance = tolerance;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  double least = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [y, z] = pairs[i];
    const Vec2 gy{-y.grad[0] / y.value, -y.grad[1] / y.value};
    const Vec2 gz{-z.grad[0] / z.value, -z.grad[1] / z.value};
    const double v = ac_violation(y.x, gy, z.x, gz, diameter);
    ++r.samples;
    least = std::min(least, v);
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.worst_location = {static_cast<std::int64_t>(i)};
    }
  }
  if (r.samples == 0) {
    r.vacuous = true;
    r.worst_violation = 0.0;
  } else {
    r.details["least_violation"] = least;
  }
  r.finish();
  return r;
}

CheckResult alpha_kappa_monotonicity(const GridField& u, const SamplerConfig& sampler,
                                     std::span<const std::pair<double, double>> alpha_pairs,
                                     std::span<const std::pair<double, double>> kappa_pairs,
                                     double kappa_for_alpha, double alpha_for_kappa) {
  sampler.validate();
  for (const auto& [a, b] : alpha_pairs) {
    ConcavityParams(a, kappa_for_alpha);
    ConcavityParams(b, kappa_for_alpha);
  }
  for (const auto& [k, k2] : kappa_pairs) {
    ConcavityParams(alpha_for_kappa, k);
    ConcavityParams(alpha_for_kappa, k2);
  }
  const GridMask& mask = *u.mask;
  const double band = sampler.band_for(mask);
  const auto nodes = detail::check_nodes(mask, band, false);
  if (nodes.size() < 2) throw GridTooCoarse("monotonicity check needs two nodes in the band");

  CheckResult r;
  r.name = "alpha_kappa_monotonicity";
  r.tolerance = 1e-12;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  Rng rng(sampler.seed);
  std::size_t triples = 0;
  std::size_t premises = 0;
  for (std::size_t s = 0; s < sampler.pair_count; ++s) {
    const auto [a, b] = detail::draw_pair(rng, nodes);
    for (double t : sampler.t_values) {
      const auto ut = u.interpolate(detail::lerp(mask.position(a), mask.position(b), t));
      if (!ut || !(*ut > 0.0)) continue;
      ++triples;
      auto record = [&](double premise, double conclusion, std::int64_t which) {
        ++r.samples;
        if (premise < 0.0) return;
        ++premises;
        if (-conclusion > r.worst_violation) {
          r.worst_violation = -conclusion;
          r.worst_location = {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b), which};
        }
      };
      for (std::size_t p = 0; p < alpha_pairs.size(); ++p) {
        const auto [al, be] = alpha_pairs[p];
        record(concavity_margin(al, kappa_for_alpha, u[a], u[b], *ut, t),
               concavity_margin(be, kappa_for_alpha, u[a], u[b], *ut, t), static_cast<std::int64_t>(p));
      }
      for (std::size_t p = 0; p < kappa_pairs.size(); ++p) {
        const auto [k, k2] = kappa_pairs[p];
        record(concavity_margin(alpha_for_kappa, k, u[a], u[b], *ut, t),
               concavity_margin(alpha_for_kappa, k2, u[a], u[b], *ut, t),
               static_cast<std::int64_t>(alpha_pairs.size() + p));
      }
    }
  }
  if (premises == 0) {
    r.vacuous = true;
    r.worst_violation = 0.0;
  }
  r.details["triples"] = triples;
  r.details["premises_holding"] = premises;
  r.details["seed"] = sampler.seed;
  r.finish();
  return r;
}

double trace_functional(const std::vector<double>& q, int n, TraceFunctional functional) {
  const Eigen::Map<const Eigen::MatrixXd> m(q.data(), n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw DomainViolation("matrix is not positive definite");
  const double trace_inv = llt.solve(Eigen::MatrixXd::Identity(n, n)).trace();
  return functional == TraceFunctional::reciprocal_inverse_trace ? 1.0 / trace_inv : trace_inv;
}

CheckResult trace_concavity_property(std::uint64_t seed, std::size_t trials, int dim_lo, int dim_hi,
                                     TraceFunctional functional) {
  if (dim_lo < 1 || dim_hi < dim_lo) throw ConfigError("bad matrix size range");
  CheckResult r;
  r.name = "trace_concavity";
  r.tolerance = 1e-12;  // relative to the largest functional value involved
  r.worst_violation = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  auto random_spd = [&rng](int n) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    }
    Eigen::MatrixXd a = g * g.transpose() / n;
    a.diagonal().array() += 1e-2;
    return a;
  };
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const int n = dim_lo + static_cast<int>(trial % static_cast<std::size_t>(dim_hi - dim_lo + 1));
    const Eigen::MatrixXd a = random_spd(n);
    const Eigen::MatrixXd b = random_spd(n);
    const Eigen::MatrixXd m = 0.5 * (a + b);
    auto phi = [&](const Eigen::MatrixXd& q) {
      return trace_functional(std::vector<double>(q.data(), q.data() + q.size()), n, functional);
    };
    const double fa = phi(a);
    const double fb = phi(b);
    const double fm = phi(m);
    const double scale = std::max({std::abs(fa), std::abs(fb), std::abs(fm)});
    const double v = (0.5 * (fa + fb) - fm) / scale;
    ++r.samples;
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.worst_location = {static_cast<std::int64_t>(trial), n};
    }
  }
  if (r.samples == 0) {
    r.vacuous = true;
    r.worst_violation = 0.0;
  }
  r.details["seed"] = seed;
  r.details["functional"] = functional == TraceFunctional::reciprocal_inverse_trace
                                ? "reciprocal_inverse_trace"
                                : "inverse_trace";
  r.details["dims"] = {dim_lo, dim_hi};
  r.finish();
  return r;
}

}  // namespace plc
