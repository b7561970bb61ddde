#include "egadv/egspace.hpp"

#include "egadv/polybasis.hpp"
#include "egadv/quadrature.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace egadv {

double evaluate_broken(const Triangle& cell, const BrokenField& field, std::size_t cell_index,
                       const Point& x) {
  return modal_basis(field.degree).eval(cell.to_reference(x)).dot(field.block(cell_index));
}

EGSpace::EGSpace(std::shared_ptr<const TwoLevelMesh> mesh, int k, int l, int m)
    : mesh_(std::move(mesh)), k_(k), l_(l), m_(m) {
  if (!mesh_) throw std::invalid_argument("EGSpace needs a mesh");
  if (k < 1 || k > kMaxDegree)
    throw std::invalid_argument("CG degree k must be in [1, " + std::to_string(kMaxDegree) +
                                "], got " + std::to_string(k));
  if (!(m >= -1 && m <= l && l <= k))
    throw std::invalid_argument("enrichment degrees must satisfy -1 <= m <= l <= k (k=" +
                                std::to_string(k) + ", l=" + std::to_string(l) +
                                ", m=" + std::to_string(m) + ")");
  build_cg_numbering();
  build_embedding();
}

int EGSpace::l_block_size() const {
  return static_cast<int>(mesh_->coarse().size()) * poly_dim(l_);
}

int EGSpace::m_block_size() const {
  return static_cast<int>(mesh_->leaf_count()) * poly_dim(m_);
}

int EGSpace::leaf_dim() const { return poly_dim(k_); }

std::span<const int> EGSpace::cg_dofs(std::size_t coarse_element) const {
  const auto n = static_cast<std::size_t>(poly_dim(k_));
  return std::span<const int>(cg_dofs_).subspan(coarse_element * n, n);
}

void EGSpace::build_cg_numbering() {
  const CoarseMesh& coarse = mesh_->coarse();
  cg_nodes_ = coarse.vertices;
  const auto n = static_cast<std::size_t>(poly_dim(k_));
  cg_dofs_.assign(coarse.size() * n, -1);
  std::map<std::pair<int, int>, int> edge_node;
  for (std::size_t e = 0; e < coarse.size(); ++e) {
    const auto& t = coarse.triangles[e];
    for (std::size_t i = 0; i < 3; ++i) cg_dofs_[e * n + i] = t[i];
    if (k_ < 2) continue;
    for (std::size_t i = 0; i < 3; ++i) {
      const int a = t[i], b = t[(i + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_node.find(key);
      if (it == edge_node.end()) {
        const int id = static_cast<int>(cg_nodes_.size());
        cg_nodes_.push_back(0.5 * (coarse.vertices[static_cast<std::size_t>(a)] +
                                   coarse.vertices[static_cast<std::size_t>(b)]));
        it = edge_node.emplace(key, id).first;
      }
      cg_dofs_[e * n + 3 + i] = it->second;
    }
  }
}

std::vector<int> EGSpace::generators_on_leaf(std::size_t leaf) const {
  const Leaf& lf = mesh_->leaves()[leaf];
  const auto parent = static_cast<std::size_t>(lf.parent);
  std::vector<int> gens(cg_dofs(parent).begin(), cg_dofs(parent).end());
  const int nl = poly_dim(l_), nm = poly_dim(m_);
  for (int i = 0; i < nl; ++i) gens.push_back(l_offset() + lf.parent * nl + i);
  for (int i = 0; i < nm; ++i) gens.push_back(m_offset() + static_cast<int>(leaf) * nm + i);
  return gens;
}

double EGSpace::generator_value(int gen, std::size_t leaf, const Point& x) const {
  const Leaf& lf = mesh_->leaves()[leaf];
  const auto parent = static_cast<std::size_t>(lf.parent);
  if (gen < l_offset()) {
    const auto dofs = cg_dofs(parent);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] == gen) {
        const Point xi = mesh_->coarse().triangle(parent).to_reference(x);
        return lagrange_basis(k_).eval(xi)[static_cast<Eigen::Index>(i)];
      }
    return 0.0;
  }
  if (gen < m_offset()) {
    const int nl = poly_dim(l_);
    const int owner = (gen - l_offset()) / nl;
    if (owner != lf.parent) return 0.0;
    const Point xi = mesh_->coarse().triangle(parent).to_reference(x);
    return modal_basis(l_).eval(xi)[(gen - l_offset()) % nl];
  }
  const int nm = poly_dim(m_);
  const int owner = (gen - m_offset()) / nm;
  if (owner != static_cast<int>(leaf)) return 0.0;
  return modal_basis(m_).eval(lf.geometry.to_reference(x))[(gen - m_offset()) % nm];
}

void EGSpace::build_embedding() {
  const auto& leaves = mesh_->leaves();
  const int nk = poly_dim(k_);
  const QuadratureRule& rule = cell_rule(2 * k_);
  const Eigen::MatrixXd psi = modal_basis(k_).tabulate(rule);  // nq x nk
  const Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(
      rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(leaves.size() * static_cast<std::size_t>(nk) * 12);
  Eigen::VectorXd values(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    const Leaf& lf = leaves[l];
    for (int gen : generators_on_leaf(l)) {
      for (std::size_t q = 0; q < rule.size(); ++q)
        values[static_cast<Eigen::Index>(q)] =
            generator_value(gen, l, lf.geometry.to_physical(rule.points[q]));
      // The leaf mass matrix 2|L| I cancels the Jacobian of the quadrature.
      const Eigen::VectorXd c = psi.transpose() * values.cwiseProduct(weights);
      for (int i = 0; i < nk; ++i)
        if (c[i] != 0.0)
          triplets.emplace_back(static_cast<int>(l) * nk + i, gen, c[i]);
    }
  }
  leaf_embedding_.resize(static_cast<Eigen::Index>(leaves.size()) * nk, size());
  leaf_embedding_.setFromTriplets(triplets.begin(), triplets.end());
  leaf_embedding_.prune(1.0, 1e-15);
}

Coefficients EGSpace::constant(double value) const {
  Coefficients c = Coefficients::Zero(size());
  c.head(cg_size()).setConstant(value);
  return c;
}

std::shared_ptr<const EGSpace> build_space(std::shared_ptr<const TwoLevelMesh> mesh, int k, int l,
                                           int m) {
  return std::make_shared<const EGSpace>(std::move(mesh), k, l, m);
}

BrokenField embed_leaves(const EGSpace& space, const Coefficients& coeffs) {
  if (coeffs.size() != space.size())
    throw std::invalid_argument("coefficient vector length " + std::to_string(coeffs.size()) +
                                " does not match space size " + std::to_string(space.size()));
  return BrokenField{space.k(), space.leaf_embedding() * coeffs};
}

BrokenField embed(const EGSpace& space, const Coefficients& coeffs) {
  const BrokenField on_leaves = embed_leaves(space, coeffs);
  const TwoLevelMesh& mesh = space.mesh();
  const CoarseMesh& fine = mesh.fine();
  const int nk = poly_dim(space.k());
  const QuadratureRule& rule = cell_rule(2 * space.k());
  const ReferenceBasis& basis = modal_basis(space.k());
  const Eigen::MatrixXd psi = basis.tabulate(rule);
  BrokenField out{space.k(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fine.size()) * nk)};
  Eigen::VectorXd values(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t f = 0; f < fine.size(); ++f) {
    const auto leaf = static_cast<std::size_t>(mesh.leaf_of_fine(f));
    const Triangle& lt = mesh.leaves()[leaf].geometry;
    const Triangle ft = fine.triangle(f);
    if (mesh.leaves()[leaf].depth == mesh.max_depth()) {
      out.coeffs.segment(static_cast<Eigen::Index>(f) * nk, nk) = on_leaves.block(leaf);
      continue;
    }
    for (std::size_t q = 0; q < rule.size(); ++q)
      values[static_cast<Eigen::Index>(q)] =
          rule.weights[q] * evaluate_broken(lt, on_leaves, leaf, ft.to_physical(rule.points[q]));
    out.coeffs.segment(static_cast<Eigen::Index>(f) * nk, nk) = psi.transpose() * values;
  }
  return out;
}

double evaluate(const EGSpace& space, const Coefficients& coeffs, std::size_t leaf,
                const Point& x) {
  if (coeffs.size() != space.size())
    throw std::invalid_argument("coefficient vector length does not match space size");
  if (leaf >= space.mesh().leaf_count() || !space.mesh().leaves()[leaf].geometry.contains(x, 1e-10))
    throw std::invalid_argument("evaluation point outside leaf " + std::to_string(leaf));
  double v = 0.0;
  for (int g : space.generators_on_leaf(leaf)) v += coeffs[g] * space.generator_value(g, leaf, x);
  return v;
}

}  // namespace egadv
