#include "plc/eigensolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "plc/error.hpp"
#include "plc/parallel.hpp"

namespace plc {
namespace {

struct AxisRow {
  double diag;
  double minus;  // coefficient of the -direction neighbour
  double plus;
};

// Shortley-Weller second difference along one axis, gaps in units of h.
AxisRow axis_row(double gap_minus, double gap_plus, double h2) {
  const double sum = gap_minus + gap_plus;
  return {2.0 / (h2 * gap_minus * gap_plus), -2.0 / (h2 * gap_minus * sum),
          -2.0 / (h2 * gap_plus * sum)};
}

Eigen::SparseMatrix<double> assemble(const GridMask& mask) {
  const std::size_t n = mask.size();
  const double h2 = mask.h() * mask.h();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n * (mask.dimension() == 2 ? 5 : 3));
  for (std::size_t k = 0; k < n; ++k) {
    double diag = 0.0;
    for (int axis = 0; axis < mask.dimension(); ++axis) {
      const int dm = 2 * axis;
      const int dp = 2 * axis + 1;
      const AxisRow row = axis_row(mask.gap(k, dm), mask.gap(k, dp), h2);
      diag += row.diag;
      if (const auto q = mask.neighbour(k, dm); q >= 0) {
        triplets.emplace_back(static_cast<int>(k), static_cast<int>(q), row.minus);
      }
      if (const auto q = mask.neighbour(k, dp); q >= 0) {
        triplets.emplace_back(static_cast<int>(k), static_cast<int>(q), row.plus);
      }
    }
    triplets.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  // Plain sequential loop: fixed summation order.
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<double> apply_laplacian(const GridMask& mask, std::span<const double> values) {
  if (values.size() != mask.size()) {
    throw ConfigError("apply_laplacian: field size does not match mask");
  }
  const double h2 = mask.h() * mask.h();
  std::vector<double> out(values.size());
  parallel_blocks(values.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      double acc = 0.0;
      for (int axis = 0; axis < mask.dimension(); ++axis) {
        const int dm = 2 * axis;
        const int dp = 2 * axis + 1;
        const AxisRow row = axis_row(mask.gap(k, dm), mask.gap(k, dp), h2);
        acc += row.diag * values[k];
        if (const auto q = mask.neighbour(k, dm); q >= 0) {
          acc += row.minus * values[static_cast<std::size_t>(q)];
        }
        if (const auto q = mask.neighbour(k, dp); q >= 0) {
          acc += row.plus * values[static_cast<std::size_t>(q)];
        }
      }
      out[k] = acc;
    }
  });
  return out;
}

GridField apply_laplacian(const GridField& field) {
  return GridField(field.mask, apply_laplacian(*field.mask, field.values), field.role);
}

std::vector<Vec2> gradient(const GridField& field) {
  const GridMask& mask = *field.mask;
  const double h = mask.h();
  std::vector<Vec2> out(field.size(), Vec2{0.0, 0.0});
  parallel_blocks(field.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      for (int axis = 0; axis < mask.dimension(); ++axis) {
        const int dm = 2 * axis;
        const int dp = 2 * axis + 1;
        const auto qm = mask.neighbour(k, dm);
        const auto qp = mask.neighbour(k, dp);
        const double fm = qm >= 0 ? field.values[static_cast<std::size_t>(qm)] : 0.0;
        const double fp = qp >= 0 ? field.values[static_cast<std::size_t>(qp)] : 0.0;
        const double f0 = field.values[k];
        const double a = mask.gap(k, dm) * h;
        const double b = mask.gap(k, dp) * h;
        out[k][static_cast<std::size_t>(axis)] =
            (a * a * fp - b * b * fm - (a * a - b * b) * f0) / (a * b * (a + b));
      }
    }
  });
  return out;
}

EigenResult smallest_eigenpair(std::shared_ptr<const GridMask> mask, const EigenOptions& options) {
  require_resolution(*mask);
  const Eigen::SparseMatrix<double> a = assemble(*mask);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed");

  const auto n = static_cast<Eigen::Index>(mask->size());
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  double previous = 0.0;
  double residual = 1.0;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd y = lu.solve(x);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    const double yy = dot(y, y);
    lambda = dot(x, y) / yy;
    x = y / std::sqrt(yy);
    const Eigen::VectorXd r = a * x - lambda * x;
    residual = std::sqrt(dot(r, r)) / std::abs(lambda);
    const double change = std::abs(lambda - previous) / std::abs(lambda);
    previous = lambda;
    if (change <= options.tolerance && residual <= options.residual_tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "inverse iteration did not converge in " << options.max_iterations
       << " iterations (residual " << residual << ")";
    throw SolverError(os.str());
  }

  double peak = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(x[i]) > std::abs(peak)) peak = x[i];
  }
  std::vector<double> u(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = x[i] / peak;
  for (double& v : u) {
    if (!(v > 0.0)) throw SolverError("computed ground state is not positive");
  }
  // Exact 1 at the maximum.
  const auto top = std::max_element(u.begin(), u.end());
  *top = 1.0;

  EigenResult result;
  result.u = GridField(std::move(mask), std::move(u), FieldRole::u);
  result.lambda1 = rayleigh_quotient(result.u);
  const auto au = apply_laplacian(*result.u.mask, result.u.values);
  double rr = 0.0;
  double uu = 0.0;
  for (std::size_t k = 0; k < au.size(); ++k) {
    const double d = au[k] - result.lambda1 * result.u.values[k];
    rr += d * d;
    uu += result.u.values[k] * result.u.values[k];
  }
  result.residual = std::sqrt(rr) / (std::abs(result.lambda1) * std::sqrt(uu));
  result.iterations = it;
  if (!(result.lambda1 > 0.0)) throw SolverError("nonpositive eigenvalue");
  return result;
}

EigenResult smallest_eigenpair(const ConvexDomain& domain, double h, const EigenOptions& options) {
  return smallest_eigenpair(std::make_shared<const GridMask>(rasterize(domain, h)), options);
}

double rayleigh_quotient(const GridField& u) {
  const auto au = apply_laplacian(*u.mask, u.values);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < au.size(); ++k) {
    num += u.values[k] * au[k];
    den += u.values[k] * u.values[k];
  }
  return num / den;
}

RichardsonResult richardson_lambda(const ConvexDomain& domain, std::vector<double> spacings,
                                   const EigenOptions& options) {
  if (spacings.size() < 2) throw ConfigError("Richardson extrapolation needs two spacings");
  std::sort(spacings.begin(), spacings.end(), std::greater<>());
  for (std::size_t i = 1; i < spacings.size(); ++i) {
    if (std::abs(spacings[i - 1] / spacings[i] - 2.0) > 1e-9) {
      throw ConfigError("Richardson extrapolation needs spacings in ratio 2");
    }
  }
  RichardsonResult r;
  r.spacings = spacings;
  for (double h : spacings) r.lambdas.push_back(smallest_eigenpair(domain, h, options).lambda1);
  const std::size_t m = r.lambdas.size();
  const double coarse = r.lambdas[m - 2];
  const double fine = r.lambdas[m - 1];
  r.lambda = (4.0 * fine - coarse) / 3.0;
  if (m >= 3) {
    const double d1 = r.lambdas[m - 3] - coarse;
    const double d2 = coarse - fine;
    if (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 0.0) r.order = std::log2(d1 / d2);
  } else if (const auto ref = reference_lambda1(domain)) {
    const double e1 = std::abs(coarse - *ref);
    const double e2 = std::abs(fine - *ref);
    if (e1 > 0.0 && e2 > 0.0) r.order = std::log2(e1 / e2);
  }
  return r;
}

double bessel_j0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

double bessel_j0_first_zero() {
  static const double zero = [] {
    double lo = 2.0;
    double hi = 3.0;
    while (hi - lo > 1e-15) {
      const double mid = 0.5 * (lo + hi);
      if (bessel_j0(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }();
  return zero;
}

std::optional<double> reference_lambda1(const ConvexDomain& domain) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  switch (domain.kind()) {
    case DomainKind::interval: {
      const double l = domain.b() - domain.a();
      return pi2 / (l * l);
    }
    case DomainKind::disc: {
      const double j = bessel_j0_first_zero();
      return j * j / (domain.radius() * domain.radius());
    }
    case DomainKind::polygon: {
      double sa = 0.0;
      double sb = 0.0;
      if (domain.rectangle_sides(sa, sb)) return pi2 * (1.0 / (sa * sa) + 1.0 / (sb * sb));
      return std::nullopt;
    }
    case DomainKind::ellipse: {
      const auto s = domain.semi_axes();
      if (s[0] == s[1]) {
        const double j = bessel_j0_first_zero();
        return j * j / (s[0] * s[0]);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace plc
