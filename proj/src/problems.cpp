#include "egadv/problems.hpp"

#include <cmath>
#include <numbers>

namespace egadv {

double manufactured_solution(double t, const Point& x) {
  return std::cos(7.0 * x.x()) * std::cos(7.0 * x.y()) + std::exp(-t);
}

Vector2 manufactured_velocity(const Point& x) {
  return {std::exp(0.5 * x.x() + 0.5 * x.y()), std::exp(0.5 * x.x() - 0.5 * x.y())};
}

double manufactured_source(double t, const Point& x) {
  const double c1 = std::cos(7.0 * x.x()), s1 = std::sin(7.0 * x.x());
  const double c2 = std::cos(7.0 * x.y()), s2 = std::sin(7.0 * x.y());
  const Vector2 a = manufactured_velocity(x);
  const double du_dx1 = -7.0 * s1 * c2;
  const double du_dx2 = -7.0 * c1 * s2;
  const double div_a = 0.5 * a.x() - 0.5 * a.y();
  const double decay = std::exp(-t);
  return -decay + a.x() * du_dx1 + a.y() * du_dx2 + (c1 * c2 + decay) * div_a;
}

ProblemSpec manufactured_problem() {
  ProblemSpec p;
  p.velocity = [](double, const Point& x) { return manufactured_velocity(x); };
  p.source = manufactured_source;
  p.dirichlet = manufactured_solution;
  p.initial = [](const Point& x) { return manufactured_solution(0.0, x); };
  p.final_time = 0.5;
  p.steady_velocity = true;
  return p;
}

double solid_body_initial(const Point& x) {
  constexpr double radius2 = 0.0225;
  const auto g = [&](double cx, double cy) { return std::hypot(x.x() - cx, x.y() - cy) / 0.15; };
  const auto inside = [&](double cx, double cy) {
    const double dx = x.x() - cx, dy = x.y() - cy;
    return dx * dx + dy * dy <= radius2;
  };
  if (inside(0.5, 0.75) && (x.x() <= 0.475 || x.x() >= 0.525 || x.y() >= 0.85)) return 1.0;
  if (inside(0.5, 0.25)) return 1.0 - g(0.5, 0.25);
  if (inside(0.25, 0.5)) return 0.25 * (1.0 + std::cos(std::numbers::pi * g(0.25, 0.5)));
  return 0.0;
}

ProblemSpec solid_body_problem() {
  ProblemSpec p;
  p.velocity = [](double, const Point& x) { return Vector2(0.5 - x.y(), x.x() - 0.5); };
  p.source = {};
  p.dirichlet = {};
  p.initial = solid_body_initial;
  p.final_time = 2.0 * std::numbers::pi;
  p.steady_velocity = true;
  return p;
}

}  // namespace egadv
