#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "plc/lower_hull.hpp"

namespace plc::hull {
namespace {

using i128 = __int128;

// Error-free transforms (Dekker / Knuth).
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  e = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

// Adds b to a nonoverlapping expansion ordered by increasing magnitude.
void grow_expansion(std::vector<double>& e, double b) {
  double q = b;
  std::vector<double> out;
  out.reserve(e.size() + 1);
  for (double component : e) {
    double sum = 0.0;
    double err = 0.0;
    two_sum(q, component, sum, err);
    if (err != 0.0) out.push_back(err);
    q = sum;
  }
  if (q != 0.0) out.push_back(q);
  e.swap(out);
}

int sign(i128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

i128 det3(const std::array<std::array<i128, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// A perturbation term: column c (0 = x, 1 = y, 2 = z) replaced by the unit
// vector of row repl[c], or kept when repl[c] < 0.
using Term = std::array<int, 3>;

const std::vector<Term>& all_terms() {
  static const std::vector<Term> terms = [] {
    std::vector<Term> out;
    for (int a = -1; a < 4; ++a) {
      for (int b = -1; b < 4; ++b) {
        for (int c = -1; c < 4; ++c) {
          if ((a >= 0 && (a == b || a == c)) || (b >= 0 && b == c)) continue;
          out.push_back({a, b, c});
        }
      }
    }
    return out;
  }();
  return terms;
}

// Sign of det [[x_r, y_r, z_r, 1]]_r with the columns of `term` replaced.
int term_sign(std::span<const LatticePoint> pts, const std::array<int, 4>& ids, const Term& term) {
  auto int_entry = [&](int r, int c) -> i128 {
    if (term[static_cast<std::size_t>(c)] >= 0) return term[static_cast<std::size_t>(c)] == r ? 1 : 0;
    const LatticePoint& p = pts[static_cast<std::size_t>(ids[static_cast<std::size_t>(r)])];
    return c == 0 ? p.x : p.y;
  };
  if (term[2] >= 0) {
    // Integer matrix: expand along the z column, which is a unit vector.
    const int r = term[2];
    std::array<std::array<i128, 3>, 3> minor{};
    int mr = 0;
    for (int row = 0; row < 4; ++row) {
      if (row == r) continue;
      minor[static_cast<std::size_t>(mr)] = {int_entry(row, 0), int_entry(row, 1), 1};
      ++mr;
    }
    const i128 cof = ((r + 2) % 2 == 0 ? 1 : -1) * det3(minor);
    return sign(cof);
  }
  std::array<std::int64_t, 4> coeff{};
  std::array<double, 4> z{};
  for (int r = 0; r < 4; ++r) {
    std::array<std::array<i128, 3>, 3> minor{};
    int mr = 0;
    for (int row = 0; row < 4; ++row) {
      if (row == r) continue;
      minor[static_cast<std::size_t>(mr)] = {int_entry(row, 0), int_entry(row, 1), 1};
      ++mr;
    }
    const i128 cof = ((r + 2) % 2 == 0 ? 1 : -1) * det3(minor);
    coeff[static_cast<std::size_t>(r)] = static_cast<std::int64_t>(cof);
    z[static_cast<std::size_t>(r)] = pts[static_cast<std::size_t>(ids[static_cast<std::size_t>(r)])].z;
  }
  return sign_of_sum(coeff, z);
}

}  // namespace

int sign_of_sum(std::span<const std::int64_t> coeff, std::span<const double> z) {
  double approx = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const double t = static_cast<double>(coeff[i]) * z[i];
    approx += t;
    magnitude += std::abs(t);
  }
  const double bound = 1e-15 * static_cast<double>(coeff.size() + 1) * magnitude;
  if (approx > bound) return 1;
  if (approx < -bound) return -1;
  if (magnitude == 0.0) return 0;

  std::vector<double> expansion;
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    double p = 0.0;
    double e = 0.0;
    two_product(static_cast<double>(coeff[i]), z[i], p, e);
    if (e != 0.0) grow_expansion(expansion, e);
    if (p != 0.0) grow_expansion(expansion, p);
  }
  for (auto it = expansion.rbegin(); it != expansion.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

int orient2d(const LatticePoint& a, const LatticePoint& b, const LatticePoint& c) {
  const i128 d = static_cast<i128>(b.x - a.x) * (c.y - a.y) - static_cast<i128>(b.y - a.y) * (c.x - a.x);
  return sign(d);
}

int orient3d(std::span<const LatticePoint> pts, int a, int b, int c, int d) {
  const std::array<int, 4> ids{a, b, c, d};
  const auto& terms = all_terms();
  // The unperturbed determinant first.
  const int s0 = term_sign(pts, ids, terms.front());
  if (s0 != 0) return -s0;

  // Rank of each row by global index: lower index, larger perturbation.
  std::array<int, 4> rank{};
  for (int r = 0; r < 4; ++r) {
    int k = 0;
    for (int q = 0; q < 4; ++q) {
      if (ids[static_cast<std::size_t>(q)] < ids[static_cast<std::size_t>(r)]) ++k;
    }
    rank[static_cast<std::size_t>(r)] = k;
  }
  // Term weight: sum of 2^(3 rank + column) over replaced cells; smaller
  // weight means a lower power of the infinitesimal, hence dominance.
  std::vector<std::pair<int, std::size_t>> order;
  order.reserve(terms.size());
  for (std::size_t t = 1; t < terms.size(); ++t) {
    int weight = 0;
    for (int col = 0; col < 3; ++col) {
      const int r = terms[t][static_cast<std::size_t>(col)];
      if (r >= 0) weight += 1 << (3 * rank[static_cast<std::size_t>(r)] + col);
    }
    order.emplace_back(weight, t);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [weight, t] : order) {
    const int s = term_sign(pts, ids, terms[t]);
    if (s != 0) return -s;
  }
  return 1;  // unreachable: the fully perturbed term is +-1
}

std::vector<int> lower_hull_1d(std::span<const std::int64_t> x, std::span<const double> z) {
  std::vector<int> chain;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    while (chain.size() >= 2) {
      const auto p0 = static_cast<std::size_t>(chain[chain.size() - 2]);
      const auto p1 = static_cast<std::size_t>(chain[chain.size() - 1]);
      const auto p2 = static_cast<std::size_t>(i);
      // cross((p1 - p0), (p2 - p0)) in the (x, z) plane.
      const std::array<std::int64_t, 3> c{x[p2] - x[p1], -(x[p2] - x[p0]), x[p1] - x[p0]};
      const std::array<double, 3> zz{z[p0], z[p1], z[p2]};
      if (sign_of_sum(c, zz) > 0) break;
      chain.pop_back();
    }
    chain.push_back(i);
  }
  return chain;
}

}  // namespace plc::hull
