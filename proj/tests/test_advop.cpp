#include "doctest.h"
#include "egadv/advop.hpp"
#include "egadv/polybasis.hpp"
#include "egadv/projection.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace egadv;

namespace {

std::shared_ptr<const TwoLevelMesh> mesh_of(int level, std::vector<int> marks, int depth) {
  return std::make_shared<const TwoLevelMesh>(build_unit_square_mesh(level), std::move(marks), depth);
}

std::shared_ptr<const TwoLevelMesh> unrefined(int level) {
  const CoarseMesh coarse = build_unit_square_mesh(level);
  return std::make_shared<const TwoLevelMesh>(coarse, std::vector<int>(coarse.size(), 0), 0);
}

std::vector<int> some_marks(std::size_t n) {
  std::vector<int> marks(n, 0);
  for (std::size_t i = 0; i < n; i += 3) marks[i] = 1 + static_cast<int>(i % 2);
  return marks;
}

ProblemSpec constant_velocity_problem(Vector2 a) {
  ProblemSpec p;
  p.velocity = [a](double, const Point&) { return a; };
  p.source = [](double, const Point&) { return 0.0; };
  p.dirichlet = [](double, const Point&) { return 1.0; };
  p.flux_data = [](double, const Point&) { return 0.0; };
  p.inflow_kind = [](int, const Point&) { return BoundaryKind::dirichlet; };
  p.initial = [](const Point&) { return 1.0; };
  p.final_time = 1.0;
  p.steady_velocity = true;
  return p;
}

ProblemSpec rotation_problem() {
  ProblemSpec p = constant_velocity_problem({0, 0});
  p.velocity = [](double, const Point& x) { return Vector2(0.5 - x.y(), x.x() - 0.5); };
  return p;
}

double field_norm(const EGSpace& space, const Coefficients& c) {
  return oracle::leaf_l2_distance(
      space.mesh(), [&](std::size_t l, const Point& x) { return evaluate(space, c, l, x); },
      [](std::size_t, const Point&) { return 0.0; });
}

/// Independent face integral of f over every face of the mesh.
template <class F>
double face_sum(const TwoLevelMesh& mesh, F&& f, int exactness = kMaxEdgeExactness) {
  const auto& rule = edge_rule(exactness);
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.faces().size(); ++i) {
    const Face& face = mesh.faces()[i];
    for (std::size_t q = 0; q < rule.size(); ++q)
      sum += rule.weights[q] * face.length * f(face, face.point(rule.points[q].x()));
  }
  return sum;
}

}  // namespace

TEST_CASE("upwind flux") {
  CHECK(upwind_flux(2.0, 3.0, 1.0) == 6.0);
  CHECK(upwind_flux(-2.0, 3.0, 1.0) == -2.0);
  CHECK(upwind_flux(0.0, 3.0, 1.0) == 0.0);
  for (int i = 0; i < 50; ++i) {
    const double an = oracle::uniform(-3, 3), g = oracle::uniform(-3, 3);
    CHECK(upwind_flux(an, g, g) == doctest::Approx(g * an).epsilon(1e-15));
  }
}

TEST_CASE("jump identity on random faces") {
  const auto mesh = mesh_of(2, some_marks(16), 2);
  const auto space = build_space(mesh, 2, 2, 1);
  const Coefficients c = oracle::random_vector(space->size());
  const auto& rule = edge_rule(6);
  for (const Face& face : mesh->faces()) {
    if (face.kind != FaceKind::interior) continue;
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = face.point(rule.points[q].x());
      const double um = evaluate(*space, c, static_cast<std::size_t>(face.minus), x);
      const double up = evaluate(*space, c, static_cast<std::size_t>(face.plus), x);
      const double w = rule.weights[q] * face.length;
      lhs += w * (um * um - up * up);
      rhs += w * 2.0 * 0.5 * (um + up) * (um - up);
    }
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("mass matrix of the conforming P1 space") {
  const auto mesh = unrefined(1);
  const auto op = assemble_mass(build_space(mesh, 1, -1, -1));
  const Eigen::MatrixXd m(op->mass());
  // lumped nodal areas: a third of the area of every triangle touching the node
  Eigen::VectorXd lumped = Eigen::VectorXd::Zero(5);
  for (std::size_t e = 0; e < mesh->coarse().size(); ++e) {
    const auto dofs = op->space().cg_dofs(e);
    for (int d : dofs) lumped[d] += mesh->coarse().triangle(e).area() / 3.0;
  }
  CHECK((m.rowwise().sum() - lumped).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(oracle::scaled_rank(m) == 5);
}

TEST_CASE("mass matrix equals the brute-force Gram matrix") {
  for (const auto [k, l, m] : {std::array{1, 0, 0}, std::array{1, 1, 1}, std::array{2, 1, 0}, std::array{2, 2, 1}}) {
    const auto space = build_space(mesh_of(1, {0, 1, 0, 2}, 2), k, l, m);
    const auto op = assemble_mass(space);
    const Eigen::MatrixXd sparse(op->mass());
    CHECK((sparse - oracle::dense_gram(*space)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sparse - sparse.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * sparse.cwiseAbs().maxCoeff());
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd x = oracle::random_vector(space->size());
      CHECK(x.dot(sparse * x) >= -1e-14);
    }
    const Coefficients one = space->constant(1.0);
    CHECK(one.dot(sparse * one) == doctest::Approx(1.0).epsilon(1e-13));
  }
  const auto space = build_space(unrefined(1), 1, 0, 0);
  CHECK(oracle::scaled_rank(Eigen::MatrixXd(assemble_mass(space)->mass())) == 8);
}

TEST_CASE("leaf blocks are scaled identities") {
  const auto mesh = mesh_of(1, {0, 1, 0, 2}, 2);
  const auto space = build_space(mesh, 2, 1, 1);
  const auto op = assemble_mass(space);
  const Eigen::MatrixXd m(op->mass());
  const int off = space->m_offset();
  const int n = poly_dim(1);
  const Eigen::MatrixXd leaf_block = m.block(off, off, space->m_block_size(), space->m_block_size());
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(leaf_block.rows(), leaf_block.cols());
  for (std::size_t l = 0; l < mesh->leaf_count(); ++l)
    expected.block(static_cast<Eigen::Index>(l) * n, static_cast<Eigen::Index>(l) * n, n, n) =
        2.0 * mesh->leaves()[l].geometry.area() * Eigen::MatrixXd::Identity(n, n);
  CHECK((leaf_block - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mass solves") {
  SparseMatrix a(2, 2);
  a.insert(0, 0) = 2.0;
  a.insert(1, 1) = 1.0;
  SparseMatrix b(2, 2);
  b.insert(0, 0) = 1.0;
  for (const Preconditioner p : {Preconditioner::cholesky, Preconditioner::jacobi, Preconditioner::none}) {
    SolverOptions options;
    options.preconditioner = p;
    CHECK((solve_mass(a, Eigen::Vector2d(2, 1), options) - Eigen::Vector2d(1, 1)).norm() < 1e-12);
    CHECK((solve_mass(b, Eigen::Vector2d(1, 0), options) - Eigen::Vector2d(1, 0)).norm() < 1e-12);
    CHECK_THROWS_AS((void)solve_mass(b, Eigen::Vector2d(1, 1), options), SolverError);
  }

  // consistent singular EG systems: the embedded solution is unique
  const auto space = build_space(mesh_of(2, some_marks(16), 2), 2, 1, 1);
  const auto op = assemble_mass(space);
  const Coefficients x = oracle::random_vector(space->size());
  const Eigen::VectorXd rhs = op->mass() * x;
  for (const Preconditioner p : {Preconditioner::cholesky, Preconditioner::jacobi}) {
    SolverOptions options;
    options.preconditioner = p;
    options.relative_tolerance = p == Preconditioner::cholesky ? 1e-10 : 1e-8;
    SolverStats stats;
    const Coefficients y = solve_mass(*op, rhs, options, {}, &stats);
    CHECK(stats.relative_residual <= options.relative_tolerance);
    CHECK(field_norm(*space, y - x) < 1e-6 * field_norm(*space, x));
  }
}

TEST_CASE("constants are preserved") {
  const auto mesh = mesh_of(2, some_marks(16), 2);
  for (const auto [k, l, m] : {std::array{1, 0, 0}, std::array{2, 1, 1}, std::array{2, 2, -1}}) {
    const auto op = assemble_mass(build_space(mesh, k, l, m));
    for (const ProblemSpec& problem : {constant_velocity_problem({1.0, 0.5}), rotation_problem()}) {
      const SemiDiscreteSystem system(op, problem);
      const Coefficients dc = system.time_derivative(0.0, op->space().constant(1.0));
      CHECK(field_norm(op->space(), dc) < 1e-10);
    }
  }
}

TEST_CASE("unit source without transport") {
  const auto op = assemble_mass(build_space(mesh_of(1, {0, 1, 0, 0}, 1), 2, 1, 0));
  ProblemSpec problem = constant_velocity_problem({0, 0});
  problem.source = [](double, const Point&) { return 1.0; };
  const SemiDiscreteSystem system(op, problem);
  for (const BoundaryKind kind : system.face_kinds()) CHECK(kind == BoundaryKind::outflow);
  const Coefficients c = oracle::random_vector(op->space().size());
  const Coefficients dc = system.time_derivative(0.0, c);
  const double err = oracle::leaf_l2_distance(
      op->space().mesh(), [&](std::size_t l, const Point& x) { return evaluate(op->space(), dc, l, x); },
      [](std::size_t, const Point&) { return 1.0; });
  CHECK(err < 1e-10);
}

TEST_CASE("global balance") {
  const auto mesh = mesh_of(2, some_marks(16), 2);
  const Vector2 a(1.0, 0.5);
  ProblemSpec problem = constant_velocity_problem(a);
  problem.source = [](double t, const Point& x) { return x.x() + x.y() + t; };
  problem.dirichlet = [](double, const Point& x) { return 1.0 + x.x() * x.y(); };
  problem.flux_data = [](double, const Point& x) { return 2.0 + x.x(); };
  problem.inflow_kind = [](int tag, const Point&) { return tag == kBottom ? BoundaryKind::flux : BoundaryKind::dirichlet; };
  problem.flux_margin = 0.1;
  for (int k = 1; k <= 2; ++k) {
    const auto space = build_space(mesh, k, k - 1, 0);
    const auto op = assemble_mass(space);
    const SemiDiscreteSystem system(op, problem);
    const Coefficients c = oracle::random_vector(space->size());
    const double t = 0.3;
    const double lhs = space->constant(1.0).dot(system.residual(t, c));

    const double source = oracle::leaf_l2_distance(
        *mesh, [&](std::size_t, const Point& x) { return std::sqrt(problem.source(t, x)); },
        [](std::size_t, const Point&) { return 0.0; });
    const double boundary = face_sum(*mesh, [&](const Face& face, const Point& x) {
      if (face.kind == FaceKind::interior) return 0.0;
      const double an = a.dot(face.normal);
      if (an > 0) return -evaluate(*space, c, static_cast<std::size_t>(face.minus), x) * an;
      if (face.boundary_tag == kBottom) return problem.flux_data(t, x);
      return problem.dirichlet(t, x) * std::abs(an);
    });
    CHECK(lhs == doctest::Approx(source * source + boundary).epsilon(1e-10));
  }
}

// |a.nu| has a kink inside faces crossed by the rotation's sign change, so
// the identity is checked at the face points of the operator itself.
TEST_CASE("energy identity for divergence-free transport") {
  const auto mesh = mesh_of(2, some_marks(16), 2);
  ProblemSpec problem = rotation_problem();
  problem.dirichlet = [](double, const Point&) { return 0.0; };
  for (const auto [k, l, m] : {std::array{1, 0, 0}, std::array{1, 1, 0}, std::array{2, 1, 1}, std::array{2, 2, 2}}) {
    const auto space = build_space(mesh, k, l, m);
    const auto op = assemble_mass(space);
    const SemiDiscreteSystem system(op, problem);
    const Coefficients c = oracle::random_vector(space->size());
    const double lhs = c.dot(system.residual(0.0, c));
    const double dissipation = face_sum(*mesh, [&](const Face& face, const Point& x) {
      const Vector2 a = problem.velocity(0.0, x);
      const double um = evaluate(*space, c, static_cast<std::size_t>(face.minus), x);
      const double up = face.kind == FaceKind::interior ? evaluate(*space, c, static_cast<std::size_t>(face.plus), x) : 0.0;
      return std::abs(a.dot(face.normal)) * (um - up) * (um - up);
    }, 2 * k + 2);
    CHECK(lhs <= 0.0);
    CHECK(lhs == doctest::Approx(-0.5 * dissipation).epsilon(1e-10));
  }
}

TEST_CASE("consistency for a smooth stationary solution") {
  const Vector2 a(1.0, 0.5);
  const ScalarFunction u = [](const Point& x) { return std::sin(2 * x.x() + x.y()); };
  ProblemSpec problem = constant_velocity_problem(a);
  problem.source = [a](double, const Point& x) { return (2 * a.x() + a.y()) * std::cos(2 * x.x() + x.y()); };
  problem.dirichlet = [u](double, const Point& x) { return u(x); };
  for (int k = 1; k <= 2; ++k) {
    std::vector<double> defects;
    for (int level = 2; level <= 4; ++level) {
      const auto space = build_space(unrefined(level), k, k - 1, -1);
      const auto op = assemble_mass(space);
      const SemiDiscreteSystem system(op, problem);
      defects.push_back(field_norm(*space, system.time_derivative(0.0, eg_project_initial(*space, u))));
    }
    for (std::size_t i = 1; i < defects.size(); ++i) CHECK(std::log2(defects[i - 1] / defects[i]) > k - 0.3);
  }
}

TEST_CASE("boundary classification errors") {
  // the rotation changes sign in the middle of every level-1 boundary face
  CHECK_THROWS_AS(SemiDiscreteSystem(assemble_mass(build_space(unrefined(1), 1, 0, 0)), rotation_problem()),
                  std::invalid_argument);

  ProblemSpec flux = constant_velocity_problem({1.0, 0.5});
  flux.inflow_kind = [](int, const Point&) { return BoundaryKind::flux; };
  flux.flux_margin = 0.6;
  const auto op = assemble_mass(build_space(unrefined(2), 1, 0, 0));
  CHECK_THROWS_AS(SemiDiscreteSystem(op, flux), std::invalid_argument);
  flux.flux_margin = 0.4;
  CHECK_NOTHROW(SemiDiscreteSystem(op, flux));

  ProblemSpec reversing = constant_velocity_problem({0, 0});
  reversing.velocity = [](double t, const Point&) { return Vector2(1.0 - 2.0 * t, 0.0); };
  reversing.steady_velocity = false;
  const SemiDiscreteSystem system(op, reversing);
  CHECK_NOTHROW(system.check_inflow(0.25));
  CHECK_THROWS_AS(system.check_inflow(1.0), std::runtime_error);
  CHECK(system.max_speed(0.0) == doctest::Approx(1.0));
}
