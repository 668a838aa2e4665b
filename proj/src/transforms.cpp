#include "plc/transforms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "plc/error.hpp"

namespace plc {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void require_kappa(double kappa, bool allow_one) {
  if (!(kappa > 0.0) || kappa > 1.0 || (!allow_one && kappa == 1.0)) {
    std::ostringstream os;
    os << "kappa = " << kappa << " outside " << (allow_one ? "(0, 1]" : "(0, 1)");
    throw DomainViolation(os.str());
  }
}

}  // namespace

ConcavityParams::ConcavityParams(double alpha, double kappa) : alpha_(alpha), kappa_(kappa) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    std::ostringstream os;
    os << "alpha = " << alpha << " outside (0, 1]";
    throw DomainViolation(os.str());
  }
  require_kappa(kappa, true);
}

double l_alpha(double alpha, double s) {
  if (!(s > 0.0) || s > 1.0) {
    std::ostringstream os;
    os << "L_alpha argument " << s << " outside (0, 1]";
    throw DomainViolation(os.str());
  }
  if (s == 1.0) return 0.0;
  return -std::pow(-std::log(s), alpha);
}

double kappa_bar(double lambda1, double diameter) {
  if (!(lambda1 > 0.0) || !(diameter > 0.0)) {
    throw DomainViolation("kappa_bar needs positive eigenvalue and diameter");
  }
  const double product = lambda1 * diameter * diameter / kPi2;
  // The interval attains the bound exactly; allow rounding noise there.
  if (product < 1.0 - 1e-12) {
    std::ostringstream os;
    os << "inconsistent inputs: lambda1 D^2 / pi^2 = " << product << " < 1";
    throw DomainViolation(os.str());
  }
  return std::exp(-1.5 * std::max(product - 1.0, 0.0));
}

double locality_target(double lambda1, double diameter) {
  return kPi2 / (lambda1 * diameter * diameter);
}

GridField w_field(const GridField& u, double kappa) {
  require_kappa(kappa, true);
  const double base = -std::log(kappa);
  std::vector<double> w(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = u.values[k];
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "w_field: nonpositive u = " << v << " at node " << k;
      throw DomainViolation(os.str());
    }
    w[k] = std::sqrt(std::max(0.0, base - std::log(v)));
  }
  return GridField(u.mask, std::move(w), FieldRole::w_kappa);
}

double psi(double kappa, double s) {
  require_kappa(kappa, true);
  if (!(s > 0.0)) throw DomainViolation("psi needs s > 0");
  if (kappa == 1.0 && s < 1e-8) return 1.0;
  const double s2 = s * s;
  return std::expm1(2.0 * (s2 + std::log(kappa))) / (2.0 * s2);
}

double w_bar(double kappa, double target) {
  require_kappa(kappa, false);
  if (!(target > 0.0)) throw DomainViolation("w_bar needs a positive target");
  const double lo0 = std::sqrt(-std::log(kappa));
  double lo = lo0;
  double hi = 2.0 * lo0 + 1.0;
  while (psi(kappa, hi) <= target) hi *= 2.0;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double value = psi(kappa, mid);
    if (std::abs(value - target) <= 1e-14 * std::max(1.0, target)) break;
    if (value < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

double w_bar(double kappa, double lambda1, double diameter) {
  return w_bar(kappa, locality_target(lambda1, diameter));
}

double u_bar(double kappa, double w_bar_value) {
  require_kappa(kappa, false);
  return std::exp(-w_bar_value * w_bar_value) / kappa;
}

std::vector<std::uint8_t> omega_kappa_mask(const GridField& u, double level) {
  std::vector<std::uint8_t> out(u.size(), 0);
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = u.values[k] > level ? 1 : 0;
  return out;
}

GridField reconstruct_u_kappa(const GridField& w_env, double kappa) {
  require_kappa(kappa, true);
  const double floor_value = std::sqrt(-std::log(kappa));
  std::vector<double> out(w_env.size());
  for (std::size_t k = 0; k < w_env.size(); ++k) {
    double w = w_env.values[k];
    if (!(w >= floor_value - 1e-12)) {
      std::ostringstream os;
      os << "reconstruct_u_kappa: envelope value " << w << " below sqrt(-log kappa) = "
         << floor_value << " at node " << k;
      throw DomainViolation(os.str());
    }
    w = std::max(w, floor_value);
    // -log kappa - w^2 written as (s - w)(s + w) with s = sqrt(-log kappa).
    out[k] = std::exp((floor_value - w) * (floor_value + w));
  }
  return GridField(w_env.mask, std::move(out), FieldRole::u_kappa);
}

LocalityData locality_data(double kappa, double lambda1, double diameter) {
  LocalityData d;
  d.kappa = kappa;
  d.target = locality_target(lambda1, diameter);
  d.w_bar = w_bar(kappa, d.target);
  d.u_bar = u_bar(kappa, d.w_bar);
  return d;
}

}  // namespace plc
