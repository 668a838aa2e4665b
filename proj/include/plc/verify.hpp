#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "plc/envelope.hpp"
#include "plc/field.hpp"
#include "plc/transforms.hpp"

namespace plc {

/// Outcome of one check. `pass` is exactly `worst_violation <= tolerance`;
/// positive violations mean the inequality failed by that much.
struct CheckResult {
  std::string name;
  bool pass = false;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::vector<std::int64_t> worst_location;  // node indices, or a pair
  bool vacuous = false;                      // nothing to test; passes
  nlohmann::json details = nlohmann::json::object();

  void finish() { pass = worst_violation <= tolerance; }
  nlohmann::json to_json() const;
};

struct SamplerConfig {
  std::uint64_t seed = 42;
  std::size_t pair_count = 10000;
  std::vector<double> t_values{0.5};
  std::optional<double> band;  // default: default_check_band(mask)

  double band_for(const GridMask& mask) const;
  /// Throws ConfigError on pair_count = 0 or t outside (0, 1).
  void validate() const;
};

/// Value and gradient at a point, for the analytic overloads.
struct PointSample {
  Point x;
  double value = 0.0;
  Vec2 grad{0.0, 0.0};
};

/// L_alpha(kappa u) concave along sampled segments between banded nodes.
CheckResult segment_concavity_check(const GridField& u, const ConcavityParams& params,
                                    const SamplerConfig& sampler);

/// directional_min_curvature >= -tol on banded nodes, tol defaulting to
/// convexity_tolerance over those nodes.
CheckResult hessian_convexity_check(const GridField& w, std::optional<double> band = {},
                                    std::optional<double> tolerance = {});

/// <grad v(z) - grad v(y), e> >= (2 pi / D) tan(pi |z - y| / (2 D)) with
/// v = -log u on sampled pairs of banded nodes. Tolerance 10 h max|grad v|.
CheckResult ac_modulus_check(const GridField& u, double diameter, const SamplerConfig& sampler);
/// Same inequality on explicit pairs; samples carry u and grad u.
CheckResult ac_modulus_check(std::span<const std::pair<PointSample, PointSample>> pairs,
                             double diameter, double tolerance);

/// |grad u|^2 + lambda1 u^2 <= lambda1 on banded nodes, tolerance
/// 10 h lambda1^(3/2) D.
CheckResult li_yau_check(const GridField& u, double lambda1, std::optional<double> band = {});
CheckResult li_yau_check(std::span<const PointSample> samples, double lambda1, double tolerance);

/// Discrete residual of -lap w + (1/w)[(2 w^2 - 1)|grad w|^2 + lambda1 / 2]
/// on banded nodes. Passes when the median |residual| is within
/// kPdeResidualConstant (h / D)^2 times the median magnitude of its terms.
inline constexpr double kPdeResidualConstant = 4.0;
CheckResult pde_residual_check(const GridField& w, double lambda1, std::optional<double> band = {});

/// |p|^2 >= pi^2 / (2 D^2) on the facets containing strict-gap nodes.
CheckResult envelope_gradient_check(const GridField& w, const Envelope& env, double diameter);

/// max over banded nodes of -lap_h u_k - lambda1 u_k <= 1e-6 lambda1.
CheckResult subsolution_check(const GridField& u_kappa, double lambda1, std::optional<double> band = {});
/// max over banded nodes of |grad u_k| <= sqrt(lambda1) (1 + h).
CheckResult lipschitz_check(const GridField& u_kappa, double lambda1, std::optional<double> band = {});
/// Edge-based Dirichlet energy <= lambda1 (1 + 1e-2) times the L2 mass.
CheckResult rayleigh_check(const GridField& u_kappa, double lambda1);
double dirichlet_energy(const GridField& f);
double l2_mass(const GridField& f);

/// Omega_kappa = {u > u_bar} is nonempty, discretely convex, and lies in the
/// contact set of w_kappa. `env` must be built from w_field(u, kappa).
CheckResult locality_check(const GridField& u, const Envelope& env, double kappa, double lambda1,
                           double diameter, const SamplerConfig& sampler);
std::vector<std::size_t> omega_kappa_nodes(const GridField& u, double level);

/// Concavity margin at one triple: L(kappa u(z_t)) - (1-t)L(kappa u(x)) - t L(kappa u(y)).
double concavity_margin(double alpha, double kappa, double ux, double uy, double ut, double t);

/// Whenever the (alpha, kappa) inequality holds at a sampled triple, the
/// (beta, kappa) and (alpha, kappa') inequalities hold too, up to 1e-12.
/// The implication is a theorem for beta >= alpha and kappa' <= kappa; pairs
/// are taken as given, so reversed pairs can fail.
CheckResult alpha_kappa_monotonicity(const GridField& u, const SamplerConfig& sampler,
                                     std::span<const std::pair<double, double>> alpha_pairs,
                                     std::span<const std::pair<double, double>> kappa_pairs,
                                     double kappa_for_alpha, double alpha_for_kappa);

enum class TraceFunctional {
  reciprocal_inverse_trace,  // [Tr(Q^-1)]^-1, concave
  inverse_trace,             // Tr(Q^-1), convex: a negative control
};

/// Midpoint concavity of the functional on random SPD pairs of sizes
/// dim_lo..dim_hi, with 1e-12 relative slack.
CheckResult trace_concavity_property(std::uint64_t seed, std::size_t trials, int dim_lo = 2,
                                     int dim_hi = 6,
                                     TraceFunctional functional = TraceFunctional::reciprocal_inverse_trace);
double trace_functional(const std::vector<double>& q, int n, TraceFunctional functional);

struct SweepStep {
  double kappa = 0.0;
  bool pass = false;
  double worst_violation = 0.0;
  double tolerance = 0.0;
};

struct SweepResult {
  double kappa_bar = 0.0;
  double threshold = 0.0;  // largest kappa seen passing
  std::vector<SweepStep> steps;
};

/// Bisection on [kappa_bar, 1 - 1e-6] for the largest kappa whose w_kappa
/// passes hessian_convexity_check. Empirical only.
SweepResult kappa_sweep(const GridField& u, double kappa_bar, std::optional<double> band = {},
                        int iterations = 12);

}  // namespace plc
