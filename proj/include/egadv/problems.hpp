#pragma once

#include "egadv/advop.hpp"

namespace egadv {

/// u(t, x) = cos(7 x1) cos(7 x2) + exp(-t) on the unit square.
[[nodiscard]] double manufactured_solution(double t, const Point& x);

/// a(x) = (exp(x1/2 + x2/2), exp(x1/2 - x2/2)).
[[nodiscard]] Vector2 manufactured_velocity(const Point& x);

/// f = du/dt + a.grad(u) + u div(a) for the pair above.
[[nodiscard]] double manufactured_source(double t, const Point& x);

/// Smooth-solution test on (0,1)^2 for t in (0, 1/2): Dirichlet data u on
/// the inflow boundary (left and bottom sides), initial datum u(0, .).
[[nodiscard]] ProblemSpec manufactured_problem();

/// Slotted cylinder, cone and hump of the solid body rotation test.
[[nodiscard]] double solid_body_initial(const Point& x);

/// Rigid rotation a = (0.5 - x2, x1 - 0.5) over one period T = 2 pi with
/// homogeneous inflow data and no source.
[[nodiscard]] ProblemSpec solid_body_problem();

}  // namespace egadv
