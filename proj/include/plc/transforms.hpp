#pragma once

#include <cstdint>
#include <vector>

#include "plc/field.hpp"

namespace plc {

/// Exponent alpha and normalization kappa of the power-logconcavity test.
class ConcavityParams {
 public:
  ConcavityParams(double alpha, double kappa);
  double alpha() const { return alpha_; }
  double kappa() const { return kappa_; }

 private:
  double alpha_;
  double kappa_;
};

/// -(-log s)^alpha for s in (0, 1].
double l_alpha(double alpha, double s);

/// exp[-3/2 (lambda1 D^2 / pi^2 - 1)]: the normalization below which the
/// ground state is (1/2)-logconcave. Requires lambda1 D^2 >= pi^2.
double kappa_bar(double lambda1, double diameter);

/// pi^2 / (lambda1 D^2), in (0, 1] for convex domains.
double locality_target(double lambda1, double diameter);

/// (-log(kappa u))^(1/2) nodewise.
GridField w_field(const GridField& u, double kappa);

/// (kappa^2 e^{2 s^2} - 1) / (2 s^2), evaluated through expm1. For kappa = 1
/// the s -> 0 limit 1 is returned when s < 1e-8.
double psi(double kappa, double s);

/// Unique root in (sqrt(-log kappa), inf) of psi(kappa, .) = target.
double w_bar(double kappa, double target);
double w_bar(double kappa, double lambda1, double diameter);

/// (1/kappa) exp(-w_bar^2).
double u_bar(double kappa, double w_bar_value);

/// Nodes with u > level.
std::vector<std::uint8_t> omega_kappa_mask(const GridField& u, double level);

/// exp(-log kappa - w_env^2) nodewise, max exactly 1 where w_env attains
/// sqrt(-log kappa).
GridField reconstruct_u_kappa(const GridField& w_env, double kappa);

struct LocalityData {
  double kappa = 0.0;
  double w_bar = 0.0;
  double u_bar = 0.0;
  double target = 0.0;
};

LocalityData locality_data(double kappa, double lambda1, double diameter);

}  // namespace plc
