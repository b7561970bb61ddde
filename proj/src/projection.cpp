#include "egadv/projection.hpp"

#include "egadv/polybasis.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <stdexcept>

namespace egadv {
namespace {

using LeafFunction = std::function<double(std::size_t leaf, const Point& x)>;

SumSpaceField project_sum_local(const TwoLevelMesh& mesh, int l, int m, const LeafFunction& v,
                                int exactness) {
  if (l < 0 && m < 0) throw std::invalid_argument("sum space is {0}: need l >= 0 or m >= 0");
  const int nl = poly_dim(l), nm = poly_dim(m);
  const CoarseMesh& coarse = mesh.coarse();
  SumSpaceField out{l, m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(coarse.size()) * nl),
                    Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.leaf_count()) * nm)};

  const QuadratureRule& rule = cell_rule(exactness);
  const Eigen::MatrixXd psi_m = m >= 0 ? modal_basis(m).tabulate(rule) : Eigen::MatrixXd();
  Eigen::VectorXd vq(static_cast<Eigen::Index>(rule.size()));
  Eigen::MatrixXd psi_l(static_cast<Eigen::Index>(rule.size()), nl);

  for (std::size_t k = 0; k < coarse.size(); ++k) {
    const Triangle K = coarse.triangle(k);
    const auto [first, count] = mesh.leaves_of_coarse(k);
    Eigen::VectorXd b1 = Eigen::VectorXd::Zero(nl);
    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(nl, static_cast<Eigen::Index>(count) * nm);
    Eigen::VectorXd b2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count) * nm);
    Eigen::VectorXd d2(static_cast<Eigen::Index>(count) * nm);

    for (int j = 0; j < count; ++j) {
      const auto leaf = static_cast<std::size_t>(first + j);
      const Triangle& L = mesh.leaves()[leaf].geometry;
      const double jac = 2.0 * L.area();
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = L.to_physical(rule.points[q]);
        vq[static_cast<Eigen::Index>(q)] = rule.weights[q] * jac * v(leaf, x);
        if (nl > 0) psi_l.row(static_cast<Eigen::Index>(q)) = modal_basis(l).eval(K.to_reference(x)).transpose();
      }
      if (nl > 0) b1 += psi_l.transpose() * vq;
      if (nm > 0) {
        b2.segment(j * nm, nm) = psi_m.transpose() * vq;
        d2.segment(j * nm, nm).setConstant(jac);
        if (nl > 0) {
          Eigen::MatrixXd wpsi_m = psi_m;
          for (std::size_t q = 0; q < rule.size(); ++q) wpsi_m.row(static_cast<Eigen::Index>(q)) *= rule.weights[q] * jac;
          coupling.middleCols(j * nm, nm) = psi_l.transpose() * wpsi_m;
        }
      }
    }

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(nl);
    if (nl > 0) {
      const double a_diag = 2.0 * K.area();
      Eigen::MatrixXd schur = a_diag * Eigen::MatrixXd::Identity(nl, nl);
      Eigen::VectorXd rhs = b1;
      if (nm > 0) {
        const Eigen::MatrixXd scaled = coupling * d2.cwiseInverse().asDiagonal();
        schur -= scaled * coupling.transpose();
        rhs -= scaled * b2;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (schur + schur.transpose()));
      const double cutoff = 1e-12 * a_diag;
      const Eigen::VectorXd& lambda = eig.eigenvalues();
      const Eigen::MatrixXd& vecs = eig.eigenvectors();
      for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda[i] > cutoff) alpha += vecs.col(i) * (vecs.col(i).dot(rhs) / lambda[i]);
      out.coarse.segment(static_cast<Eigen::Index>(k) * nl, nl) = alpha;
    }
    if (nm > 0) {
      Eigen::VectorXd beta = b2;
      if (nl > 0) beta -= coupling.transpose() * alpha;
      out.leaf.segment(static_cast<Eigen::Index>(first) * nm, static_cast<Eigen::Index>(count) * nm) =
          beta.cwiseQuotient(d2);
    }
  }
  return out;
}

}  // namespace

BrokenField l2_project_broken(std::span<const Triangle> cells, int degree, const ScalarFunction& v,
                              int exactness) {
  const int n = poly_dim(degree);
  const QuadratureRule& rule = cell_rule(exactness);
  const Eigen::MatrixXd psi = modal_basis(degree).tabulate(rule);
  BrokenField out{degree, Eigen::VectorXd(static_cast<Eigen::Index>(cells.size()) * n)};
  Eigen::VectorXd vq(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t q = 0; q < rule.size(); ++q)
      vq[static_cast<Eigen::Index>(q)] = rule.weights[q] * v(cells[c].to_physical(rule.points[q]));
    out.coeffs.segment(static_cast<Eigen::Index>(c) * n, n) = psi.transpose() * vq;
  }
  return out;
}

BrokenField l2_project_broken(const CoarseMesh& mesh, int degree, const ScalarFunction& v,
                              int exactness) {
  std::vector<Triangle> cells(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) cells[i] = mesh.triangle(i);
  return l2_project_broken(cells, degree, v, exactness);
}

std::vector<Triangle> leaf_triangles(const TwoLevelMesh& mesh) {
  std::vector<Triangle> cells;
  cells.reserve(mesh.leaf_count());
  for (const auto& l : mesh.leaves()) cells.push_back(l.geometry);
  return cells;
}

double evaluate_sum(const TwoLevelMesh& mesh, const SumSpaceField& field, std::size_t leaf,
                    const Point& x) {
  const Leaf& lf = mesh.leaves()[leaf];
  double value = 0.0;
  if (field.l >= 0) {
    const int nl = poly_dim(field.l);
    const Point xi = mesh.coarse().triangle(static_cast<std::size_t>(lf.parent)).to_reference(x);
    value += modal_basis(field.l).eval(xi).dot(field.coarse.segment(lf.parent * nl, nl));
  }
  if (field.m >= 0) {
    const int nm = poly_dim(field.m);
    value += modal_basis(field.m)
                 .eval(lf.geometry.to_reference(x))
                 .dot(field.leaf.segment(static_cast<Eigen::Index>(leaf) * nm, nm));
  }
  return value;
}

SumSpaceField l2_project_sum(const TwoLevelMesh& mesh, int l, int m, const ScalarFunction& v,
                             int exactness) {
  return project_sum_local(mesh, l, m, [&](std::size_t, const Point& x) { return v(x); },
                           exactness);
}

Eigen::VectorXd interpolate_cg(const EGSpace& space, const ScalarFunction& v) {
  Eigen::VectorXd values(space.cg_size());
  for (int i = 0; i < space.cg_size(); ++i) values[i] = v(space.cg_nodes()[static_cast<std::size_t>(i)]);
  return values;
}

Coefficients eg_project_initial(const EGSpace& space, const ScalarFunction& v) {
  Coefficients c = Coefficients::Zero(space.size());
  c.head(space.cg_size()) = interpolate_cg(space, v);
  if (space.l() < 0 && space.m() < 0) return c;

  const TwoLevelMesh& mesh = space.mesh();
  const ReferenceBasis& lagrange = lagrange_basis(space.k());
  const auto residual = [&](std::size_t leaf, const Point& x) {
    const auto parent = static_cast<std::size_t>(mesh.leaves()[leaf].parent);
    const auto dofs = space.cg_dofs(parent);
    const Eigen::VectorXd phi = lagrange.eval(mesh.coarse().triangle(parent).to_reference(x));
    double interp = 0.0;
    for (std::size_t i = 0; i < dofs.size(); ++i) interp += c[dofs[i]] * phi[static_cast<Eigen::Index>(i)];
    return v(x) - interp;
  };
  const SumSpaceField enrich = project_sum_local(mesh, space.l(), space.m(), residual,
                                                 std::min(2 * space.k() + 4, kMaxCellExactness));
  if (space.l() >= 0) c.segment(space.l_offset(), space.l_block_size()) = enrich.coarse;
  if (space.m() >= 0) c.segment(space.m_offset(), space.m_block_size()) = enrich.leaf;
  return c;
}

Coefficients project_piecewise_constant(const EGSpace& space, const ScalarFunction& v,
                                        int exactness) {
  if (space.m() < 0)
    throw std::invalid_argument("piecewise-constant initial data needs a leaf block (m >= 0)");
  const BrokenField p0 = l2_project_broken(leaf_triangles(space.mesh()), 0, v, exactness);
  Coefficients c = Coefficients::Zero(space.size());
  const int nm = poly_dim(space.m());
  for (std::size_t l = 0; l < space.mesh().leaf_count(); ++l)
    c[space.m_offset() + static_cast<int>(l) * nm] = p0.coeffs[static_cast<Eigen::Index>(l)];
  return c;
}

}  // namespace egadv
