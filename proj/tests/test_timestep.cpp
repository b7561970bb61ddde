#include "doctest.h"
#include "egadv/problems.hpp"
#include "egadv/projection.hpp"
#include "egadv/timestep.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace egadv;

namespace {

std::shared_ptr<const TwoLevelMesh> mesh_of(int level, std::vector<int> marks, int depth) {
  return std::make_shared<const TwoLevelMesh>(build_unit_square_mesh(level), std::move(marks), depth);
}

ProblemSpec constant_state(Vector2 a) {
  ProblemSpec p;
  p.velocity = [a](double, const Point&) { return a; };
  p.source = [](double, const Point&) { return 0.0; };
  p.dirichlet = [](double, const Point&) { return 1.0; };
  p.inflow_kind = [](int, const Point&) { return BoundaryKind::dirichlet; };
  p.initial = [](const Point&) { return 1.0; };
  p.final_time = 0.5;
  p.steady_velocity = true;
  return p;
}

double field_norm(const EGSpace& space, const Coefficients& c) {
  return oracle::leaf_l2_distance(
      space.mesh(), [&](std::size_t l, const Point& x) { return evaluate(space, c, l, x); },
      [](std::size_t, const Point&) { return 0.0; });
}

double integrate_scalar(const SSPScheme& scheme, const RightHandSide& rhs, double u0, double t_end, int steps) {
  Eigen::VectorXd u(1);
  u[0] = u0;
  const double dt = t_end / steps;
  for (int n = 0; n < steps; ++n) u = ssp_step(scheme, rhs, n * dt, dt, u);
  return u[0];
}

}  // namespace

TEST_CASE("SSP coefficients are convex combinations") {
  for (int s = 2; s <= 3; ++s) {
    const SSPScheme scheme = ssp_scheme(s);
    CHECK(scheme.stages == s);
    CHECK(scheme.order == s);
    for (std::size_t i = 0; i < scheme.alpha.size(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < scheme.alpha[i].size(); ++j) {
        CHECK(scheme.alpha[i][j] >= 0.0);
        CHECK(scheme.beta[i][j] >= 0.0);
        sum += scheme.alpha[i][j];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS((void)ssp_scheme(1), std::invalid_argument);
  CHECK_THROWS_AS((void)ssp_scheme(4), std::invalid_argument);
}

TEST_CASE("stability polynomial is the truncated exponential") {
  const RightHandSide decay = [](double, const Eigen::VectorXd& u) { return Eigen::VectorXd(-u); };
  for (int s = 2; s <= 3; ++s)
    for (double z : {0.1, 0.37, 1.2}) {
      double taylor = 0.0, term = 1.0;
      for (int j = 0; j <= s; ++j) {
        taylor += term;
        term *= -z / (j + 1);
      }
      CHECK(integrate_scalar(ssp_scheme(s), decay, 1.0, z, 1) == doctest::Approx(taylor).epsilon(1e-15));
    }
  CHECK(integrate_scalar(ssp_scheme(2), decay, 1.0, 0.1, 1) == doctest::Approx(0.905).epsilon(1e-15));
}

TEST_CASE("observed order of accuracy") {
  const RightHandSide decay = [](double, const Eigen::VectorXd& u) { return Eigen::VectorXd(-u); };
  // non-autonomous: u' = cos(t) u, u = exp(sin t)
  const RightHandSide forced = [](double t, const Eigen::VectorXd& u) { return Eigen::VectorXd(std::cos(t) * u); };
  for (int s = 2; s <= 3; ++s) {
    const SSPScheme scheme = ssp_scheme(s);
    std::vector<double> e1, e2;
    for (int steps : {10, 20, 40}) {
      e1.push_back(std::abs(integrate_scalar(scheme, decay, 1.0, 1.0, steps) - std::exp(-1.0)));
      e2.push_back(std::abs(integrate_scalar(scheme, forced, 1.0, 2.0, 2 * steps) - std::exp(std::sin(2.0))));
    }
    for (std::size_t i = 1; i < e1.size(); ++i) {
      CHECK(std::log2(e1[i - 1] / e1[i]) >= s - 0.1);
      CHECK(std::log2(e2[i - 1] / e2[i]) >= s - 0.1);
    }
  }
}

TEST_CASE("steps on the semi-discrete system") {
  const auto mesh = mesh_of(2, {0, 1, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0}, 2);
  for (int k = 1; k <= 2; ++k) {
    const auto op = assemble_mass(build_space(mesh, k, k - 1, 0));
    const SSPScheme scheme = ssp_scheme(k + 1);

    SUBCASE("zero residual leaves the state unchanged") {
      ProblemSpec still = constant_state({0, 0});
      const SemiDiscreteSystem system(op, still);
      const Coefficients c = oracle::random_vector(op->space().size());
      CHECK((step(scheme, system, 0.0, 0.1, c) - c).cwiseAbs().maxCoeff() <= 1e-14 * c.cwiseAbs().maxCoeff());
      CHECK_THROWS_AS((void)step(scheme, system, 0.0, 0.0, c), std::invalid_argument);
      CHECK_THROWS_AS((void)step(scheme, system, 0.0, -1.0, c), std::invalid_argument);
    }

    SUBCASE("run to t = 0 returns the initial state") {
      const SemiDiscreteSystem system(op, constant_state({1.0, 0.5}));
      const Coefficients c = oracle::random_vector(op->space().size());
      const RunResult result = run(scheme, system, c, 0.0);
      CHECK(result.steps == 0);
      CHECK((result.coefficients - c).norm() == 0.0);
    }

    SUBCASE("constant state is preserved over many steps") {
      const SemiDiscreteSystem system(op, constant_state({1.0, 0.5}));
      const Coefficients one = op->space().constant(1.0);
      const RunResult result = run(scheme, system, one, 0.5);
      CHECK(result.steps > 20);
      const double err = oracle::leaf_l2_distance(
          *mesh, [&](std::size_t l, const Point& x) { return evaluate(op->space(), result.coefficients, l, x); },
          [](std::size_t, const Point&) { return 1.0; });
      CHECK(err < 1e-8);
    }

    SUBCASE("time step formula") {
      const SemiDiscreteSystem system(op, constant_state({0.6, 0.8}));
      double h = 1e300;
      for (const Leaf& leaf : mesh->leaves()) h = std::min(h, leaf.geometry.diameter());
      CHECK(stable_time_step(system, 0.3) == doctest::Approx(0.3 * h / (2 * k + 1)).epsilon(1e-14));
      CHECK_THROWS_AS((void)stable_time_step(system, 0.0), std::invalid_argument);
      const RunResult result = run(scheme, system, op->space().constant(1.0), 0.1, {.cfl = 0.3});
      CHECK(result.dt <= 0.3 * h / (2 * k + 1) * (1 + 1e-14));
      CHECK(result.steps == static_cast<int>(std::ceil(0.1 / result.dt - 1e-12)));
    }
  }
}

TEST_CASE("solid-body norm never increases") {
  const auto mesh = mesh_of(2, {0, 1, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0}, 2);
  for (int k = 1; k <= 2; ++k) {
    const auto op = assemble_mass(build_space(mesh, k, 0, 0));
    const SemiDiscreteSystem system(op, solid_body_problem());
    const Coefficients c0 = project_piecewise_constant(op->space(), solid_body_initial);
    double previous = field_norm(op->space(), c0);
    const double initial = previous;
    int calls = 0;
    RunOptions options;
    options.probe_every = 1;
    options.probe = [&](double, const Coefficients& c) {
      const double norm = field_norm(op->space(), c);
      CHECK(norm <= previous * (1 + 1e-6));
      previous = norm;
      ++calls;
    };
    (void)run(ssp_scheme(k + 1), system, c0, 1.0, options);
    CHECK(calls > 10);
    CHECK(previous < initial);
  }
}

TEST_CASE("instability is reported") {
  const auto mesh = mesh_of(1, {0, 0, 0, 0}, 0);
  const auto op = assemble_mass(build_space(mesh, 1, 0, 0));
  const SemiDiscreteSystem system(op, constant_state({1.0, 0.5}));
  Coefficients c = op->space().constant(1.0);
  c[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)run(ssp_scheme(2), system, c, 0.1), InstabilityError);
}
