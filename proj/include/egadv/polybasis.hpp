#pragma once

#include "egadv/geometry.hpp"
#include "egadv/quadrature.hpp"

#include <Eigen/Dense>

#include <vector>

namespace egadv {

inline constexpr int kMaxDegree = 2;

/// Dimension of P_deg in two variables; 0 for deg = -1 (absent component).
[[nodiscard]] constexpr int poly_dim(int degree) {
  return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2;
}

enum class BasisKind { lagrange, modal };

/// Polynomial basis on the reference triangle {(0,0), (1,0), (0,1)}.
///
/// Lagrange bases (degree 1, 2) are nodal at the vertices followed by the
/// midpoints of edges (0,1), (1,2), (2,0). Modal bases (degree 0..2) are
/// monomials 1, x, y, x^2, xy, y^2 orthonormalized in L2 of the reference
/// triangle; they are hierarchical, so the first poly_dim(m) functions of
/// modal(k) form modal(m).
class ReferenceBasis {
 public:
  ReferenceBasis(BasisKind kind, int degree);

  [[nodiscard]] BasisKind kind() const { return kind_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int size() const { return poly_dim(degree_); }

  [[nodiscard]] Eigen::VectorXd eval(const Point& xi) const;
  /// Row i holds the reference gradient of function i.
  [[nodiscard]] Eigen::MatrixX2d eval_grad(const Point& xi) const;

  /// Values at all rule points: (npoints x size).
  [[nodiscard]] Eigen::MatrixXd tabulate(const QuadratureRule& rule) const;

  /// Nodal points for Lagrange bases.
  [[nodiscard]] const std::vector<Point>& nodes() const { return nodes_; }

 private:
  BasisKind kind_;
  int degree_;
  Eigen::MatrixXd modal_coeffs_;  // row i: monomial coefficients of function i
  std::vector<Point> nodes_;
};

/// Shared immutable instances.
[[nodiscard]] const ReferenceBasis& modal_basis(int degree);
[[nodiscard]] const ReferenceBasis& lagrange_basis(int degree);

/// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
[[nodiscard]] double reference_monomial_integral(int a, int b);

}  // namespace egadv
