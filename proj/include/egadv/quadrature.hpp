#pragma once

#include "egadv/geometry.hpp"

#include <vector>

namespace egadv {

/// Quadrature on a reference domain. Cell rules live on the reference
/// triangle (weights sum to 1/2); edge rules live on [0, 1] and store the
/// parameter in points[i].x() (weights sum to 1).
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exactness = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxCellExactness = 8;
inline constexpr int kMaxEdgeExactness = 9;

/// Symmetric positive-weight rule on the reference triangle integrating all
/// polynomials of total degree <= exactness exactly.
/// Throws std::invalid_argument for exactness < 0 or > kMaxCellExactness.
[[nodiscard]] const QuadratureRule& cell_rule(int exactness);

/// Gauss-Legendre rule on [0, 1] exact up to the given degree.
/// Throws std::invalid_argument for exactness < 0 or > kMaxEdgeExactness.
[[nodiscard]] const QuadratureRule& edge_rule(int exactness);

}  // namespace egadv
