#include "egadv/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace egadv {
namespace {

// Orbits of barycentric points; weights normalized to sum 1 over the triangle.
struct Orbit {
  int multiplicity;  // 1: centroid, 3: (a, b, b), 6: (a, b, c)
  double weight;
  double a, b, c;
};

void append_orbit(QuadratureRule& rule, const Orbit& o) {
  auto push = [&](double l1, double l2) {
    rule.points.emplace_back(l1, l2);
    rule.weights.push_back(0.5 * o.weight);
  };
  switch (o.multiplicity) {
    case 1:
      push(1.0 / 3.0, 1.0 / 3.0);
      break;
    case 3:
      push(o.b, o.b);
      push(o.a, o.b);
      push(o.b, o.a);
      break;
    case 6:
      push(o.a, o.b);
      push(o.b, o.a);
      push(o.b, o.c);
      push(o.c, o.b);
      push(o.a, o.c);
      push(o.c, o.a);
      break;
    default:
      throw std::logic_error("bad orbit multiplicity");
  }
}

QuadratureRule make_cell_rule(int degree, std::initializer_list<Orbit> orbits) {
  QuadratureRule rule;
  rule.exactness = degree;
  for (const auto& o : orbits) append_orbit(rule, o);
  return rule;
}

// Dunavant's symmetric rules of degree 1, 2, 4, 5, 6, 8 (the degree 3 and 7
// rules carry negative weights and are replaced by the next higher one).
const std::array<QuadratureRule, kMaxCellExactness + 1>& cell_table() {
  static const std::array<QuadratureRule, kMaxCellExactness + 1> table = [] {
    const auto r1 = make_cell_rule(1, {{1, 1.0, 0, 0, 0}});
    const auto r2 = make_cell_rule(2, {{3, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 6.0, 0}});
    const auto r4 = make_cell_rule(
        4, {{3, 0.223381589678011, 0.108103018168070, 0.445948490915965, 0},
            {3, 0.109951743655322, 0.816847572980459, 0.091576213509771, 0}});
    const auto r5 = make_cell_rule(
        5, {{1, 0.225, 0, 0, 0},
            {3, 0.132394152788506, 0.059715871789770, 0.470142064105115, 0},
            {3, 0.125939180544827, 0.797426985353087, 0.101286507323456, 0}});
    const auto r6 = make_cell_rule(
        6, {{3, 0.116786275726379, 0.501426509658179, 0.249286745170910, 0},
            {3, 0.050844906370207, 0.873821971016996, 0.063089014491502, 0},
            {6, 0.082851075618374, 0.053145049844817, 0.310352451033784,
             0.636502499121399}});
    const auto r8 = make_cell_rule(
        8, {{1, 0.144315607677787, 0, 0, 0},
            {3, 0.095091634267285, 0.081414823414554, 0.459292588292723, 0},
            {3, 0.103217370534718, 0.658861384496480, 0.170569307751760, 0},
            {3, 0.032458497623198, 0.898905543365938, 0.050547228317031, 0},
            {6, 0.027230314174435, 0.008394777409958, 0.263112829634638,
             0.728492392955404}});
    return std::array<QuadratureRule, kMaxCellExactness + 1>{r1, r1, r2, r4, r4,
                                                             r5, r6, r8, r8};
  }();
  return table;
}

QuadratureRule gauss_legendre(int npoints, int exactness) {
  QuadratureRule rule;
  rule.exactness = exactness;
  for (int i = 0; i < npoints; ++i) {
    // Newton iteration on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= npoints; ++n) {
        const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = npoints * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points.emplace_back(0.5 * (1.0 - x), 0.0);
    rule.weights.push_back(0.5 * w);
  }
  return rule;
}

}  // namespace

const QuadratureRule& cell_rule(int exactness) {
  if (exactness < 0 || exactness > kMaxCellExactness)
    throw std::invalid_argument("cell quadrature exactness " + std::to_string(exactness) +
                                " not available (0.." + std::to_string(kMaxCellExactness) + ")");
  return cell_table()[static_cast<std::size_t>(exactness)];
}

const QuadratureRule& edge_rule(int exactness) {
  if (exactness < 0 || exactness > kMaxEdgeExactness)
    throw std::invalid_argument("edge quadrature exactness " + std::to_string(exactness) +
                                " not available (0.." + std::to_string(kMaxEdgeExactness) + ")");
  static const auto table = [] {
    std::array<QuadratureRule, kMaxEdgeExactness + 1> t;
    for (int e = 0; e <= kMaxEdgeExactness; ++e) t[static_cast<std::size_t>(e)] = gauss_legendre(e / 2 + 1, e);
    return t;
  }();
  return table[static_cast<std::size_t>(exactness)];
}

}  // namespace egadv
