#include <algorithm>
#include <cmath>
#include <limits>

#include "plc/eigensolver.hpp"
#include "verify_detail.hpp"

namespace plc {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double norm2(const Vec2& g) { return g[0] * g[0] + g[1] * g[1]; }

}  // namespace

CheckResult hessian_convexity_check(const GridField& w, std::optional<double> band,
                                    std::optional<double> tolerance) {
  const GridMask& mask = *w.mask;
  const double delta = band ? *band : default_check_band(mask);
  std::vector<std::size_t> nodes;
  std::vector<double> curvature;
  for (std::size_t k : banded_nodes(mask, delta)) {
    if (const auto c = directional_min_curvature(w, k)) {
      nodes.push_back(k);
      curvature.push_back(*c);
    }
  }
  if (nodes.empty()) throw GridTooCoarse("no node with a complete stencil inside the check band");
  CheckResult r;
  r.name = "hessian_convexity";
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    ++r.samples;
    if (-curvature[i] > r.worst_violation) {
      r.worst_violation = -curvature[i];
      r.worst_location = {static_cast<std::int64_t>(nodes[i])};
    }
  }
  r.tolerance = tolerance ? *tolerance : convexity_tolerance(w, nodes);
  const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
  r.details["band"] = delta;
  r.details["h"] = mask.h();
  r.details["M2"] = detail::max_hessian_norm(w, nodes);
  r.details["range"] = *hi - *lo;
  r.details["estimator"] = "directional second differences, 8 lattice directions";
  r.finish();
  return r;
}

CheckResult li_yau_check(std::span<const PointSample> samples, double lambda1, double tolerance) {
  CheckResult r;
  r.name = "li_yau";
  r.tolerance = tolerance;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  double least = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const double v = norm2(s.grad) + lambda1 * s.value * s.value - lambda1;
    least = std::min(least, v);
    ++r.samples;
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
  r.details["lambda1"] = lambda1;
  r.finish();
  return r;
}

CheckResult li_yau_check(const GridField& u, double lambda1, std::optional<double> band) {
  const GridMask& mask = *u.mask;
  const double delta = band ? *band : default_check_band(mask);
  const auto nodes = detail::check_nodes(mask, delta, false);
  const auto grad = gradient(u);
  std::vector<PointSample> samples;
  samples.reserve(nodes.size());
  for (std::size_t k : nodes) samples.push_back({mask.position(k), u[k], grad[k]});
  const double tol = 10.0 * mask.h() * std::pow(lambda1, 1.5) * mask.diameter();
  CheckResult r = li_yau_check(samples, lambda1, tol);
  for (auto& loc : r.worst_location) loc = static_cast<std::int64_t>(nodes[static_cast<std::size_t>(loc)]);
  r.details["band"] = delta;
  r.details["h"] = mask.h();
  return r;
}

CheckResult pde_residual_check(const GridField& w, double lambda1, std::optional<double> band) {
  const GridMask& mask = *w.mask;
  const double delta = band ? *band : default_check_band(mask);
  const auto nodes = detail::check_nodes(mask, delta, true);
  const auto lap = apply_laplacian(mask, w.values);  // -lap_h w
  const auto grad = gradient(w);
  std::vector<double> residual;
  std::vector<double> magnitude;
  residual.reserve(nodes.size());
  magnitude.reserve(nodes.size());
  CheckResult r;
  r.name = "pde_residual";
  double worst_abs = 0.0;
  for (std::size_t k : nodes) {
    const double wk = w[k];
    if (!(wk >= 1e-10)) {
      throw DomainViolation("pde_residual check: w below 1e-10 at node " + std::to_string(k));
    }
    const double lower = ((2.0 * wk * wk - 1.0) * norm2(grad[k]) + 0.5 * lambda1) / wk;
    const double res = lap[k] + lower;
    residual.push_back(std::abs(res));
    magnitude.push_back(std::abs(lap[k]) + std::abs(lower));
    if (std::abs(res) > worst_abs) {
      worst_abs = std::abs(res);
      r.worst_location = {static_cast<std::int64_t>(k)};
    }
  }
  r.samples = nodes.size();
  const double scale = median(magnitude);
  const double ratio = mask.h() / mask.diameter();
  r.worst_violation = median(residual);
  r.tolerance = kPdeResidualConstant * ratio * ratio * scale;
  r.details["max_abs_residual"] = worst_abs;
  r.details["median_abs_residual"] = r.worst_violation;
  r.details["term_scale"] = scale;
  r.details["constant"] = kPdeResidualConstant;
  r.details["band"] = delta;
  r.details["h"] = mask.h();
  r.finish();
  return r;
}

CheckResult subsolution_check(const GridField& u_kappa, double lambda1, std::optional<double> band) {
  const GridMask& mask = *u_kappa.mask;
  const double delta = band ? *band : default_check_band(mask);
  const auto nodes = detail::check_nodes(mask, delta, false);
  const auto lap = apply_laplacian(mask, u_kappa.values);
  CheckResult r;
  r.name = "subsolution";
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k : nodes) {
    const double v = lap[k] - lambda1 * u_kappa[k];
    ++r.samples;
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.worst_location = {static_cast<std::int64_t>(k)};
    }
  }
  r.tolerance = 1e-6 * lambda1;
  r.details["band"] = delta;
  r.details["lambda1"] = lambda1;
  r.finish();
  return r;
}

CheckResult lipschitz_check(const GridField& u_kappa, double lambda1, std::optional<double> band) {
  const GridMask& mask = *u_kappa.mask;
  const double delta = band ? *band : default_check_band(mask);
  const auto nodes = detail::check_nodes(mask, delta, false);
  const auto grad = gradient(u_kappa);
  const double bound = std::sqrt(lambda1);
  CheckResult r;
  r.name = "lipschitz";
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k : nodes) {
    const double v = std::sqrt(norm2(grad[k])) - bound;
    ++r.samples;
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.worst_location = {static_cast<std::int64_t>(k)};
    }
  }
  r.tolerance = mask.h() * bound;
  r.details["band"] = delta;
  r.details["sqrt_lambda1"] = bound;
  r.finish();
  return r;
}

double dirichlet_energy(const GridField& f) {
  const GridMask& mask = *f.mask;
  const double h = mask.h();
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    for (int d = 0; d < 2 * mask.dimension(); ++d) {
      const auto q = mask.neighbour(k, d);
      if (q >= 0) {
        // Each interior edge once, from its lower end.
        if (d % 2 == 1) {
          const double diff = f[static_cast<std::size_t>(q)] - f[k];
          sum += diff * diff;
        }
      } else {
        // Stub to the boundary, where the field vanishes.
        sum += f[k] * f[k] / mask.gap(k, d);
      }
    }
  }
  return sum * std::pow(h, mask.dimension() - 2);
}

double l2_mass(const GridField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v * v;
  return sum * std::pow(f.mask->h(), f.mask->dimension());
}

CheckResult rayleigh_check(const GridField& u_kappa, double lambda1) {
  const double energy = dirichlet_energy(u_kappa);
  const double mass = l2_mass(u_kappa);
  CheckResult r;
  r.name = "rayleigh";
  r.samples = u_kappa.size();
  r.worst_violation = energy / (lambda1 * mass) - 1.0;
  r.tolerance = 1e-2;
  r.details["energy"] = energy;
  r.details["mass"] = mass;
  r.details["quotient"] = energy / mass;
  r.details["lambda1"] = lambda1;
  r.finish();
  return r;
}

}  // namespace plc
