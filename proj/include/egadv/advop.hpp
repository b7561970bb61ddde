#pragma once

#include "egadv/egspace.hpp"
#include "egadv/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace egadv {

enum class BoundaryKind { dirichlet, flux, outflow };

/// Linear advection problem  du/dt + div(a u) = f  on the mesh domain.
/// Inflow faces (a.nu < 0) are Dirichlet or flux faces according to
/// `inflow_kind`; all remaining boundary faces are outflow.
struct ProblemSpec {
  VelocityField velocity;
  SpaceTimeFunction source;
  SpaceTimeFunction dirichlet;  // u_D on Dirichlet faces
  SpaceTimeFunction flux_data;  // g_F = |a.nu| u on flux faces
  /// Called with the boundary tag and face midpoint of an inflow face.
  std::function<BoundaryKind(int, const Point&)> inflow_kind;
  ScalarFunction initial;
  double final_time = 0.0;
  /// Flux faces must satisfy a.nu <= -flux_margin.
  double flux_margin = 0.0;
  /// Velocity does not depend on t (allows caching of a at quadrature points).
  bool steady_velocity = false;
};

/// Upwind numerical flux upw{g} (a.nu) for the face normal nu pointing from
/// the minus to the plus side: avg * an + sign(an)/2 * (g- - g+) * an, with
/// sign(0) = 0.
[[nodiscard]] constexpr double upwind_flux(double a_dot_nu, double g_minus, double g_plus) {
  const double sign = a_dot_nu > 0.0 ? 1.0 : (a_dot_nu < 0.0 ? -1.0 : 0.0);
  return 0.5 * (g_minus + g_plus) * a_dot_nu + 0.5 * sign * (g_minus - g_plus) * a_dot_nu;
}

/// Thrown by solve_mass when the tolerance is not reached; indicates a
/// right-hand side outside range(M).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Preconditioner { none, jacobi, cholesky };

struct SolverOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 0;  // 0: 10 * size
  Preconditioner preconditioner = Preconditioner::cholesky;
  /// Shift eps of the factorized preconditioner M + eps diag(M).
  double regularization = 1e-8;
};

struct SolverStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solver for the consistent semidefinite system M x = r. With the Cholesky
/// preconditioner it runs iterative refinement x += P (r - M x) with P the
/// sparse LDL^T factorization of M + eps diag(M) (zero diagonal entries
/// replaced by 1), computed once; otherwise preconditioned conjugate
/// gradients. Residuals are measured as |diag(M)^(-1/2) (r - M x)| relative to
/// |diag(M)^(-1/2) r|.
class MassSolver {
 public:
  explicit MassSolver(SparseMatrix mass, const SolverOptions& options = {});

  [[nodiscard]] const SparseMatrix& matrix() const { return mass_; }
  [[nodiscard]] const SolverOptions& options() const { return options_; }

  /// Starts from x0 (zero if empty). Throws SolverError if the tolerance is
  /// not reached.
  [[nodiscard]] Coefficients solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& x0 = {},
                                   SolverStats* stats = nullptr) const;

 private:
  [[nodiscard]] Eigen::VectorXd precondition(const Eigen::VectorXd& r) const;

  SparseMatrix mass_;
  SolverOptions options_;
  Eigen::VectorXd inv_diag_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor_;
};

class DiscreteOperator;

[[nodiscard]] Coefficients solve_mass(const SparseMatrix& mass, const Eigen::VectorXd& rhs,
                                      const SolverOptions& options = {},
                                      const Eigen::VectorXd& x0 = {},
                                      SolverStats* stats = nullptr);
/// Reuses the operator's factorization when the preconditioner settings match.
[[nodiscard]] Coefficients solve_mass(const DiscreteOperator& op, const Eigen::VectorXd& rhs,
                                      const SolverOptions& options = {},
                                      const Eigen::VectorXd& x0 = {},
                                      SolverStats* stats = nullptr);

/// Quadrature-point data of one leaf or face.
struct CellQuadrature {
  std::vector<Point> points;
  Eigen::VectorXd weights;   // reference weights times Jacobian
  Eigen::Matrix2d inverse_jacobian;
};

struct FaceQuadrature {
  std::vector<Point> points;
  Eigen::VectorXd weights;   // reference weights times face length
  Eigen::MatrixXd minus_values;  // nq x leaf_dim, modal P_k of the minus leaf
  Eigen::MatrixXd plus_values;   // empty on boundary faces
};

/// Assembled mass operator M = E^T M_leaf E over the generating system plus
/// quadrature caches (cell exactness 2k+2, face exactness 2k+2).
class DiscreteOperator {
 public:
  explicit DiscreteOperator(std::shared_ptr<const EGSpace> space);

  [[nodiscard]] const EGSpace& space() const { return *space_; }
  [[nodiscard]] std::shared_ptr<const EGSpace> space_ptr() const { return space_; }
  [[nodiscard]] const SparseMatrix& mass() const { return solver_->matrix(); }
  /// Solver with default options and a cached factorization of M.
  [[nodiscard]] const MassSolver& mass_solver() const { return *solver_; }
  [[nodiscard]] const std::vector<CellQuadrature>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<FaceQuadrature>& faces() const { return faces_; }
  /// Reference tables of the leaf modal basis at the cell rule points.
  [[nodiscard]] const Eigen::MatrixXd& cell_values() const { return psi_; }
  [[nodiscard]] const Eigen::MatrixXd& cell_grad_x() const { return dpsi_x_; }
  [[nodiscard]] const Eigen::MatrixXd& cell_grad_y() const { return dpsi_y_; }

 private:
  std::shared_ptr<const EGSpace> space_;
  std::unique_ptr<const MassSolver> solver_;
  std::vector<CellQuadrature> cells_;
  std::vector<FaceQuadrature> faces_;
  Eigen::MatrixXd psi_, dpsi_x_, dpsi_y_;
};

[[nodiscard]] std::shared_ptr<const DiscreteOperator> assemble_mass(
    std::shared_ptr<const EGSpace> space);

/// Problem bound to an operator: boundary classification (sampled at t = 0)
/// and cached velocity data. Evaluates r(c, t) and the time derivative
/// M^{-1} r(c, t).
class SemiDiscreteSystem {
 public:
  /// Throws std::invalid_argument if a boundary face has mixed inflow and
  /// outflow quadrature points, or a flux face violates the flux margin.
  SemiDiscreteSystem(std::shared_ptr<const DiscreteOperator> op, ProblemSpec problem);

  [[nodiscard]] const DiscreteOperator& op() const { return *op_; }
  [[nodiscard]] const ProblemSpec& problem() const { return problem_; }
  /// Kind of each face (interior faces are reported as outflow).
  [[nodiscard]] const std::vector<BoundaryKind>& face_kinds() const { return face_kind_; }

  /// Dual vector r_j = b(phi_j) + sum_K int U a.grad(phi_j) - flux terms.
  [[nodiscard]] Eigen::VectorXd residual(double t, const Coefficients& c) const;
  /// Same, tested against the leaf P_k basis (before applying E^T).
  [[nodiscard]] Eigen::VectorXd leaf_residual(double t, const Coefficients& c) const;
  /// Solves M dc/dt = r(c, t); warm-starts from the previous solution.
  [[nodiscard]] Coefficients time_derivative(double t, const Coefficients& c) const;

  /// Re-checks the inflow/outflow signs at time t; throws std::runtime_error
  /// if the classification has changed.
  void check_inflow(double t) const;

  /// sup |a| over cell quadrature points at time t.
  [[nodiscard]] double max_speed(double t) const;

  [[nodiscard]] const SolverStats& last_solve() const { return last_stats_; }
  SolverOptions solver_options;

 private:
  Vector2 velocity_at_cell(double t, std::size_t cell, std::size_t q) const;
  double normal_velocity_at_face(double t, std::size_t face, std::size_t q) const;

  std::shared_ptr<const DiscreteOperator> op_;
  ProblemSpec problem_;
  std::vector<BoundaryKind> face_kind_;
  std::vector<std::vector<Vector2>> cell_velocity_;  // reference-frame a, steady only
  std::vector<std::vector<double>> face_normal_velocity_;  // steady only
  mutable Coefficients warm_start_;
  mutable SolverStats last_stats_;
};

/// Convenience wrapper: binds the problem and evaluates the residual once.
[[nodiscard]] Eigen::VectorXd residual(std::shared_ptr<const DiscreteOperator> op,
                                       const ProblemSpec& problem, double t,
                                       const Coefficients& c);

}  // namespace egadv
