#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "verify_detail.hpp"

namespace plc {

CheckResult envelope_gradient_check(const GridField& w, const Envelope& env, double diameter) {
  const double bound = std::numbers::pi * std::numbers::pi / (2.0 * diameter * diameter);
  const auto& ev = env.values().values;
  CheckResult r;
  r.name = "envelope_gradient";
  r.tolerance = 1e-9 * bound;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  std::size_t gap_nodes = 0;
  double max_gap = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!env.included()[k]) continue;
    const double gap = w[k] - ev[k];
    max_gap = std::max(max_gap, gap);
    if (gap <= env.tolerance()) continue;
    ++gap_nodes;
    const auto f = env.facet_of_node(k);
    const Vec2 p = env.facets()[static_cast<std::size_t>(f)].p;
    const double v = bound - (p[0] * p[0] + p[1] * p[1]);
    ++r.samples;
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.worst_location = {static_cast<std::int64_t>(k), f};
    }
  }
  if (gap_nodes == 0) {
    r.vacuous = true;
    r.worst_violation = 0.0;
  }
  r.details["bound"] = bound;
  r.details["gap_nodes"] = gap_nodes;
  r.details["max_gap"] = max_gap;
  r.details["contact_tolerance"] = env.tolerance();
  r.finish();
  return r;
}

std::vector<std::size_t> omega_kappa_nodes(const GridField& u, double level) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] > level) out.push_back(k);
  }
  return out;
}

namespace {

// True when every point of the segment between members a and b, sampled at
// spacing h / 2, has a member among the corners of its grid cell.
bool segment_in_set(const GridMask& mask, const std::vector<std::uint8_t>& member, std::size_t a,
                    std::size_t b) {
  const auto la = mask.lattice(a);
  const auto lb = mask.lattice(b);
  const double dx = static_cast<double>(lb[0] - la[0]);
  const double dy = static_cast<double>(lb[1] - la[1]);
  const int steps = static_cast<int>(std::ceil(2.0 * std::hypot(dx, dy)));
  for (int s = 1; s < steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const double x = static_cast<double>(la[0]) + t * dx;
    const double y = static_cast<double>(la[1]) + t * dy;
    const auto i0 = static_cast<std::int64_t>(std::floor(x));
    const auto j0 = static_cast<std::int64_t>(std::floor(y));
    bool found = false;
    for (std::int64_t dj = 0; dj <= (mask.dimension() == 2 ? 1 : 0) && !found; ++dj) {
      for (std::int64_t di = 0; di <= 1 && !found; ++di) {
        const auto q = mask.interior_at(i0 + di, j0 + dj);
        found = q >= 0 && member[static_cast<std::size_t>(q)];
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

CheckResult locality_check(const GridField& u, const Envelope& env, double kappa, double lambda1,
                           double diameter, const SamplerConfig& sampler) {
  sampler.validate();
  const LocalityData data = locality_data(kappa, lambda1, diameter);
  const GridMask& mask = *u.mask;
  const auto nodes = omega_kappa_nodes(u, data.u_bar);

  CheckResult r;
  r.name = "locality";
  r.tolerance = env.tolerance();
  r.details["kappa"] = kappa;
  r.details["w_bar"] = data.w_bar;
  r.details["u_bar"] = data.u_bar;
  r.details["target"] = data.target;
  r.details["omega_nodes"] = nodes.size();
  if (nodes.empty()) {
    r.worst_violation = detail::kStructuralViolation;
    r.details["reason"] = "Omega_kappa has no grid node";
    r.finish();
    return r;
  }

  std::vector<std::uint8_t> member(u.size(), 0);
  for (std::size_t k : nodes) member[k] = 1;
  const std::size_t all_pairs = nodes.size() * (nodes.size() - 1) / 2;
  bool convex = true;
  std::size_t tested = 0;
  std::vector<std::int64_t> bad_pair;
  if (all_pairs <= sampler.pair_count) {
    for (std::size_t i = 0; i < nodes.size() && convex; ++i) {
      for (std::size_t j = i + 1; j < nodes.size() && convex; ++j) {
        ++tested;
        if (!segment_in_set(mask, member, nodes[i], nodes[j])) {
          convex = false;
          bad_pair = {static_cast<std::int64_t>(nodes[i]), static_cast<std::int64_t>(nodes[j])};
        }
      }
    }
  } else {
    Rng rng(sampler.seed);
    for (std::size_t s = 0; s < sampler.pair_count && convex; ++s) {
      const auto [a, b] = detail::draw_pair(rng, nodes);
      ++tested;
      if (!segment_in_set(mask, member, a, b)) {
        convex = false;
        bad_pair = {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)};
      }
    }
  }
  r.details["segments_tested"] = tested;
  r.details["discretely_convex"] = convex;
  if (!convex) {
    r.worst_violation = detail::kStructuralViolation;
    r.worst_location = bad_pair;
    r.details["reason"] = "a segment between members leaves Omega_kappa";
    r.samples = tested;
    r.finish();
    return r;
  }

  const auto& w = env.source();
  const auto& ev = env.values().values;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k : nodes) {
    const double gap = w[k] - ev[k];
    ++r.samples;
    if (gap > r.worst_violation) {
      r.worst_violation = gap;
      r.worst_location = {static_cast<std::int64_t>(k)};
    }
  }
  r.finish();
  return r;
}

SweepResult kappa_sweep(const GridField& u, double kappa_bar, std::optional<double> band, int iterations) {
  SweepResult out;
  out.kappa_bar = kappa_bar;
  auto run = [&](double kappa) {
    const CheckResult c = hessian_convexity_check(w_field(u, kappa), band);
    out.steps.push_back({kappa, c.pass, c.worst_violation, c.tolerance});
    return c.pass;
  };
  double hi = 1.0 - 1e-6;
  double lo = std::min(kappa_bar, hi);
  if (!run(lo)) {
    out.threshold = 0.0;
    return out;
  }
  if (lo == hi || run(hi)) {
    out.threshold = hi;
    return out;
  }
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (run(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.threshold = lo;
  return out;
}

}  // namespace plc
