#include "egadv/advop.hpp"

#include "egadv/polybasis.hpp"
#include "egadv/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace egadv {

DiscreteOperator::DiscreteOperator(std::shared_ptr<const EGSpace> space)
    : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("DiscreteOperator needs a space");
  const TwoLevelMesh& mesh = space_->mesh();
  const int k = space_->k();
  const int nk = space_->leaf_dim();
  const ReferenceBasis& basis = modal_basis(k);

  // M = E^T diag(2|L|) E
  const SparseMatrix& embedding = space_->leaf_embedding();
  Eigen::VectorXd leaf_mass(embedding.rows());
  for (std::size_t l = 0; l < mesh.leaf_count(); ++l)
    leaf_mass.segment(static_cast<Eigen::Index>(l) * nk, nk)
        .setConstant(2.0 * mesh.leaves()[l].geometry.area());
  const SparseMatrix weighted = leaf_mass.asDiagonal() * embedding;
  SparseMatrix mass(embedding.transpose() * weighted);
  mass = SparseMatrix(0.5 * (mass + SparseMatrix(mass.transpose())));
  mass.makeCompressed();
  solver_ = std::make_unique<const MassSolver>(std::move(mass));

  const QuadratureRule& cell = cell_rule(2 * k + 2);
  psi_ = basis.tabulate(cell);
  dpsi_x_.resize(static_cast<Eigen::Index>(cell.size()), nk);
  dpsi_y_.resize(static_cast<Eigen::Index>(cell.size()), nk);
  for (std::size_t q = 0; q < cell.size(); ++q) {
    const Eigen::MatrixX2d g = basis.eval_grad(cell.points[q]);
    dpsi_x_.row(static_cast<Eigen::Index>(q)) = g.col(0).transpose();
    dpsi_y_.row(static_cast<Eigen::Index>(q)) = g.col(1).transpose();
  }
  cells_.reserve(mesh.leaf_count());
  for (const Leaf& leaf : mesh.leaves()) {
    CellQuadrature cq;
    const double jac = 2.0 * leaf.geometry.area();
    cq.weights.resize(static_cast<Eigen::Index>(cell.size()));
    for (std::size_t q = 0; q < cell.size(); ++q) {
      cq.points.push_back(leaf.geometry.to_physical(cell.points[q]));
      cq.weights[static_cast<Eigen::Index>(q)] = cell.weights[q] * jac;
    }
    cq.inverse_jacobian = leaf.geometry.jacobian().inverse();
    cells_.push_back(std::move(cq));
  }

  const QuadratureRule& edge = edge_rule(2 * k + 2);
  faces_.reserve(mesh.faces().size());
  for (const Face& face : mesh.faces()) {
    FaceQuadrature fq;
    const auto nq = static_cast<Eigen::Index>(edge.size());
    fq.weights.resize(nq);
    fq.minus_values.resize(nq, nk);
    if (face.plus >= 0) fq.plus_values.resize(nq, nk);
    const Triangle& minus = mesh.leaves()[static_cast<std::size_t>(face.minus)].geometry;
    for (std::size_t q = 0; q < edge.size(); ++q) {
      const Point x = face.point(edge.points[q].x());
      const auto row = static_cast<Eigen::Index>(q);
      fq.points.push_back(x);
      fq.weights[row] = edge.weights[q] * face.length;
      fq.minus_values.row(row) = basis.eval(minus.to_reference(x)).transpose();
      if (face.plus >= 0) {
        const Triangle& plus = mesh.leaves()[static_cast<std::size_t>(face.plus)].geometry;
        fq.plus_values.row(row) = basis.eval(plus.to_reference(x)).transpose();
      }
    }
    faces_.push_back(std::move(fq));
  }
}

std::shared_ptr<const DiscreteOperator> assemble_mass(std::shared_ptr<const EGSpace> space) {
  return std::make_shared<const DiscreteOperator>(std::move(space));
}

MassSolver::MassSolver(SparseMatrix mass, const SolverOptions& options)
    : mass_(std::move(mass)), options_(options) {
  if (mass_.rows() != mass_.cols()) throw std::invalid_argument("mass matrix must be square");
  const Eigen::Index n = mass_.rows();
  const Eigen::VectorXd d = mass_.diagonal();
  inv_diag_ = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (d[i] > 0.0) inv_diag_[i] = 1.0 / d[i];
  if (options_.preconditioner != Preconditioner::cholesky || n == 0) return;
  Eigen::SparseMatrix<double> shifted = mass_;
  for (Eigen::Index i = 0; i < n; ++i)
    shifted.coeffRef(i, i) += options_.regularization / inv_diag_[i];
  factor_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(shifted);
  if (factor_->info() != Eigen::Success)
    throw SolverError("factorization of the shifted mass matrix failed");
}

Eigen::VectorXd MassSolver::precondition(const Eigen::VectorXd& r) const {
  switch (options_.preconditioner) {
    case Preconditioner::none:
      return r;
    case Preconditioner::jacobi:
      return inv_diag_.cwiseProduct(r);
    case Preconditioner::cholesky:
      return factor_->solve(r);
  }
  return r;
}

Coefficients MassSolver::solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& x0,
                               SolverStats* stats) const {
  const Eigen::Index n = mass_.rows();
  if (rhs.size() != n) throw std::invalid_argument("mass solve: right-hand side size mismatch");
  const Eigen::VectorXd scale = inv_diag_.cwiseSqrt();
  const auto scaled_norm = [&](const Eigen::VectorXd& v) { return scale.cwiseProduct(v).norm(); };
  const double rhs_norm = scaled_norm(rhs);
  if (rhs_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return Coefficients::Zero(n);
  }
  Coefficients x = x0.size() == n ? x0 : Coefficients::Zero(n);
  const int max_it = options_.max_iterations > 0 ? options_.max_iterations : static_cast<int>(10 * n);
  const double target = options_.relative_tolerance * rhs_norm;

  Eigen::VectorXd r = rhs - mass_ * x;
  double r_norm = scaled_norm(r);
  int it = 0;
  if (options_.preconditioner == Preconditioner::cholesky) {
    // Iterative refinement with the shifted factorization; stops early once
    // the residual no longer decreases (round-off in the null space of M).
    double previous = std::numeric_limits<double>::infinity();
    while (r_norm > target && it < max_it && r_norm < 0.5 * previous) {
      x += factor_->solve(r);
      r = rhs - mass_ * x;
      previous = r_norm;
      r_norm = scaled_norm(r);
      ++it;
    }
  } else {
    Eigen::VectorXd z = precondition(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd mp(n);
    double rz = r.dot(z);
    while (r_norm > target && it < max_it) {
      mp.noalias() = mass_ * p;
      const double pmp = p.dot(mp);
      if (!(pmp > 0.0)) break;
      const double alpha = rz / pmp;
      x += alpha * p;
      r -= alpha * mp;
      r_norm = scaled_norm(r);
      ++it;
      if (r_norm <= target) break;
      z = precondition(r);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
  }
  if (stats) *stats = {it, r_norm / rhs_norm};
  if (!(r_norm <= target)) {
    std::ostringstream msg;
    msg << "mass solve did not converge: relative residual " << r_norm / rhs_norm << " after "
        << it << " iterations (right-hand side not in range of M?)";
    throw SolverError(msg.str());
  }
  return x;
}

Coefficients solve_mass(const SparseMatrix& mass, const Eigen::VectorXd& rhs,
                        const SolverOptions& options, const Eigen::VectorXd& x0,
                        SolverStats* stats) {
  return MassSolver(mass, options).solve(rhs, x0, stats);
}

Coefficients solve_mass(const DiscreteOperator& op, const Eigen::VectorXd& rhs,
                        const SolverOptions& options, const Eigen::VectorXd& x0,
                        SolverStats* stats) {
  const SolverOptions& cached = op.mass_solver().options();
  if (options.preconditioner == cached.preconditioner &&
      options.regularization == cached.regularization &&
      options.relative_tolerance == cached.relative_tolerance &&
      options.max_iterations == cached.max_iterations)
    return op.mass_solver().solve(rhs, x0, stats);
  return solve_mass(op.mass(), rhs, options, x0, stats);
}

SemiDiscreteSystem::SemiDiscreteSystem(std::shared_ptr<const DiscreteOperator> op,
                                       ProblemSpec problem)
    : op_(std::move(op)), problem_(std::move(problem)) {
  if (!op_) throw std::invalid_argument("SemiDiscreteSystem needs an operator");
  if (!problem_.velocity) throw std::invalid_argument("problem has no velocity field");
  const TwoLevelMesh& mesh = op_->space().mesh();
  const auto& faces = mesh.faces();

  if (problem_.steady_velocity) {
    cell_velocity_.resize(op_->cells().size());
    for (std::size_t c = 0; c < op_->cells().size(); ++c) {
      const auto& cq = op_->cells()[c];
      for (const Point& x : cq.points)
        cell_velocity_[c].push_back(cq.inverse_jacobian * problem_.velocity(0.0, x));
    }
    face_normal_velocity_.resize(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
      for (const Point& x : op_->faces()[f].points)
        face_normal_velocity_[f].push_back(problem_.velocity(0.0, x).dot(faces[f].normal));
  }

  face_kind_.assign(faces.size(), BoundaryKind::outflow);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].kind != FaceKind::boundary) continue;
    int in = 0, out = 0;
    double max_an = -std::numeric_limits<double>::max();
    for (std::size_t q = 0; q < op_->faces()[f].points.size(); ++q) {
      const double an = normal_velocity_at_face(0.0, f, q);
      (an < 0.0 ? in : out) += 1;
      max_an = std::max(max_an, an);
    }
    if (in > 0 && out > 0) {
      std::ostringstream msg;
      msg << "boundary face " << f << " between (" << faces[f].endpoints[0].transpose() << ") and ("
          << faces[f].endpoints[1].transpose()
          << ") is partly inflow and partly outflow; refine the mesh";
      throw std::invalid_argument(msg.str());
    }
    if (in == 0) continue;
    const Point mid = 0.5 * (faces[f].endpoints[0] + faces[f].endpoints[1]);
    const BoundaryKind kind =
        problem_.inflow_kind ? problem_.inflow_kind(faces[f].boundary_tag, mid) : BoundaryKind::dirichlet;
    if (kind == BoundaryKind::outflow)
      throw std::invalid_argument("inflow face classified as outflow by the problem");
    if (kind == BoundaryKind::flux && max_an > -problem_.flux_margin)
      throw std::invalid_argument("flux boundary face violates a.nu <= -delta");
    face_kind_[f] = kind;
  }
}

Vector2 SemiDiscreteSystem::velocity_at_cell(double t, std::size_t cell, std::size_t q) const {
  if (problem_.steady_velocity) return cell_velocity_[cell][q];
  const auto& cq = op_->cells()[cell];
  return cq.inverse_jacobian * problem_.velocity(t, cq.points[q]);
}

double SemiDiscreteSystem::normal_velocity_at_face(double t, std::size_t face, std::size_t q) const {
  if (problem_.steady_velocity && !face_normal_velocity_.empty()) return face_normal_velocity_[face][q];
  return problem_.velocity(t, op_->faces()[face].points[q])
      .dot(op_->space().mesh().faces()[face].normal);
}

Eigen::VectorXd SemiDiscreteSystem::leaf_residual(double t, const Coefficients& c) const {
  const EGSpace& space = op_->space();
  const TwoLevelMesh& mesh = space.mesh();
  const int nk = space.leaf_dim();
  const Eigen::VectorXd u = embed_leaves(space, c).coeffs;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(u.size());

  const Eigen::MatrixXd& psi = op_->cell_values();
  const Eigen::MatrixXd& gx = op_->cell_grad_x();
  const Eigen::MatrixXd& gy = op_->cell_grad_y();
  const Eigen::Index nq = psi.rows();
  const auto ncells = static_cast<Eigen::Index>(op_->cells().size());
  const Eigen::Map<const Eigen::MatrixXd> ucells(u.data(), nk, ncells);
  Eigen::Map<Eigen::MatrixXd> rcells(r.data(), nk, ncells);
  const Eigen::MatrixXd values = psi * ucells;
  Eigen::MatrixXd wf(nq, ncells), wux(nq, ncells), wuy(nq, ncells);
  for (Eigen::Index cell = 0; cell < ncells; ++cell) {
    const auto& cq = op_->cells()[static_cast<std::size_t>(cell)];
    for (Eigen::Index q = 0; q < nq; ++q) {
      const auto qi = static_cast<std::size_t>(q);
      const Vector2 a_ref = velocity_at_cell(t, static_cast<std::size_t>(cell), qi);
      const double wu = cq.weights[q] * values(q, cell);
      wf(q, cell) = problem_.source ? cq.weights[q] * problem_.source(t, cq.points[qi]) : 0.0;
      wux(q, cell) = wu * a_ref.x();
      wuy(q, cell) = wu * a_ref.y();
    }
  }
  rcells.noalias() += psi.transpose() * wf;
  rcells.noalias() += gx.transpose() * wux;
  rcells.noalias() += gy.transpose() * wuy;

  const auto& faces = mesh.faces();
  Eigen::VectorXd um, up, wm;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    const FaceQuadrature& fq = op_->faces()[f];
    const auto minus = static_cast<Eigen::Index>(face.minus) * nk;
    const auto n = static_cast<Eigen::Index>(fq.points.size());
    um.noalias() = fq.minus_values * u.segment(minus, nk);
    wm.resize(n);
    if (face.kind == FaceKind::interior) {
      const auto plus = static_cast<Eigen::Index>(face.plus) * nk;
      up.noalias() = fq.plus_values * u.segment(plus, nk);
      for (Eigen::Index q = 0; q < n; ++q)
        wm[q] = fq.weights[q] * upwind_flux(normal_velocity_at_face(t, f, static_cast<std::size_t>(q)), um[q], up[q]);
      r.segment(minus, nk).noalias() -= fq.minus_values.transpose() * wm;
      r.segment(plus, nk).noalias() += fq.plus_values.transpose() * wm;
      continue;
    }
    for (Eigen::Index q = 0; q < n; ++q) {
      const auto qi = static_cast<std::size_t>(q);
      const double an = normal_velocity_at_face(t, f, qi);
      switch (face_kind_[f]) {
        case BoundaryKind::outflow:
          wm[q] = -fq.weights[q] * um[q] * an;
          break;
        case BoundaryKind::dirichlet:
          wm[q] = problem_.dirichlet
                      ? fq.weights[q] * problem_.dirichlet(t, fq.points[qi]) * std::abs(an)
                      : 0.0;
          break;
        case BoundaryKind::flux:
          wm[q] = problem_.flux_data ? fq.weights[q] * problem_.flux_data(t, fq.points[qi]) : 0.0;
          break;
      }
    }
    r.segment(minus, nk).noalias() += fq.minus_values.transpose() * wm;
  }
  return r;
}

Eigen::VectorXd SemiDiscreteSystem::residual(double t, const Coefficients& c) const {
  return op_->space().leaf_embedding().transpose() * leaf_residual(t, c);
}

Coefficients SemiDiscreteSystem::time_derivative(double t, const Coefficients& c) const {
  const Eigen::VectorXd r = residual(t, c);
  warm_start_ = solve_mass(*op_, r, solver_options, warm_start_, &last_stats_);
  return warm_start_;
}

void SemiDiscreteSystem::check_inflow(double t) const {
  const auto& faces = op_->space().mesh().faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].kind != FaceKind::boundary) continue;
    const bool inflow = face_kind_[f] != BoundaryKind::outflow;
    for (std::size_t q = 0; q < op_->faces()[f].points.size(); ++q) {
      const double an = normal_velocity_at_face(t, f, q);
      if ((an < 0.0) != inflow) {
        std::ostringstream msg;
        msg << "inflow boundary changed at t = " << t << " on face " << f;
        throw std::runtime_error(msg.str());
      }
    }
  }
}

double SemiDiscreteSystem::max_speed(double t) const {
  double s = 0.0;
  for (const auto& cq : op_->cells())
    for (const Point& x : cq.points) s = std::max(s, problem_.velocity(t, x).norm());
  return s;
}

Eigen::VectorXd residual(std::shared_ptr<const DiscreteOperator> op, const ProblemSpec& problem,
                         double t, const Coefficients& c) {
  return SemiDiscreteSystem(std::move(op), problem).residual(t, c);
}

}  // namespace egadv
