#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "plc/field.hpp"
#include "plc/geometry.hpp"

namespace plc {

/// Discrete -Laplacian with Shortley-Weller boundary rows and homogeneous
/// Dirichlet data beyond the boundary. Second-order accurate on curved and
/// polygonal boundaries.
std::vector<double> apply_laplacian(const GridMask& mask, std::span<const double> values);
GridField apply_laplacian(const GridField& field);

/// Gradient per interior node: central differences where both axis
/// neighbours are interior, three-point differences through the boundary
/// point (value 0) otherwise.
std::vector<Vec2> gradient(const GridField& field);

struct EigenOptions {
  double tolerance = 1e-10;          // relative eigenvalue change between iterations
  double residual_tolerance = 1e-8;  // ||A u - lambda u|| / ||lambda u||
  int max_iterations = 500;
};

struct EigenResult {
  double lambda1 = 0.0;
  GridField u;  // role u, max value exactly 1
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest eigenpair of the discrete operator by inverse power iteration
/// from the all-ones vector. Requires at least 8 spacings across the
/// diameter; throws SolverError if the iteration does not converge.
EigenResult smallest_eigenpair(std::shared_ptr<const GridMask> mask, const EigenOptions& options = {});
EigenResult smallest_eigenpair(const ConvexDomain& domain, double h, const EigenOptions& options = {});

struct RichardsonResult {
  double lambda = 0.0;                 // h^2-extrapolated estimate
  std::optional<double> order;         // observed convergence order
  std::vector<double> spacings;
  std::vector<double> lambdas;         // per spacing, same order
};

/// Extrapolates the two finest spacings (ratio 2). The observed order uses
/// three spacings when given, otherwise the closed-form reference if the
/// domain has one.
RichardsonResult richardson_lambda(const ConvexDomain& domain, std::vector<double> spacings,
                                   const EigenOptions& options = {});

/// First positive zero of the Bessel function J0, by bisection on its power
/// series over [2, 3].
double bessel_j0(double x);
double bessel_j0_first_zero();

/// Closed-form first eigenvalue for intervals, rectangles and discs.
std::optional<double> reference_lambda1(const ConvexDomain& domain);

/// u.(A u) / u.u for the discrete operator.
double rayleigh_quotient(const GridField& u);

}  // namespace plc
