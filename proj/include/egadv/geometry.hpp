#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>

namespace egadv {

using Point = Eigen::Vector2d;
using Vector2 = Eigen::Vector2d;

/// Scalar field of space only, e.g. an initial datum or a time slice u(t, .).
using ScalarFunction = std::function<double(const Point&)>;
/// Scalar field of time and space.
using SpaceTimeFunction = std::function<double(double, const Point&)>;
/// Vector field of time and space (the advection velocity).
using VelocityField = std::function<Vector2(double, const Point&)>;

/// Straight-edged triangle with the affine map x = v0 + J * xi from the
/// reference triangle {(0,0), (1,0), (0,1)}.
struct Triangle {
  std::array<Point, 3> v;

  [[nodiscard]] Eigen::Matrix2d jacobian() const {
    Eigen::Matrix2d j;
    j.col(0) = v[1] - v[0];
    j.col(1) = v[2] - v[0];
    return j;
  }
  [[nodiscard]] double signed_area() const { return 0.5 * jacobian().determinant(); }
  [[nodiscard]] double area() const { return std::abs(signed_area()); }
  [[nodiscard]] double diameter() const {
    return std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()});
  }
  [[nodiscard]] Point centroid() const { return (v[0] + v[1] + v[2]) / 3.0; }

  [[nodiscard]] Point to_physical(const Point& xi) const {
    return v[0] + xi.x() * (v[1] - v[0]) + xi.y() * (v[2] - v[0]);
  }
  [[nodiscard]] Point to_reference(const Point& x) const {
    return jacobian().inverse() * (x - v[0]);
  }
  /// Point is inside the closed triangle up to a relative tolerance on the
  /// barycentric coordinates.
  [[nodiscard]] bool contains(const Point& x, double tol = 1e-12) const {
    const Point xi = to_reference(x);
    return xi.x() >= -tol && xi.y() >= -tol && xi.x() + xi.y() <= 1.0 + tol;
  }
};

}  // namespace egadv
