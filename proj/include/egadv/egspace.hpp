#pragma once

#include "egadv/geometry.hpp"
#include "egadv/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <span>
#include <vector>

namespace egadv {

using Coefficients = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Element-wise polynomial field of one degree over a list of triangles, in
/// the orthonormal modal basis of each triangle (block i occupies
/// [i*poly_dim(degree), (i+1)*poly_dim(degree))).
struct BrokenField {
  int degree = 0;
  Eigen::VectorXd coeffs;

  [[nodiscard]] auto block(std::size_t cell) const {
    const int n = (degree + 1) * (degree + 2) / 2;
    return coeffs.segment(static_cast<Eigen::Index>(cell) * n, n);
  }
};

/// Value of a broken field on `cell` at physical point x (x is not checked
/// to lie inside the cell).
[[nodiscard]] double evaluate_broken(const Triangle& cell, const BrokenField& field,
                                     std::size_t cell_index, const Point& x);

/// The enriched space (P_k(T_H) cap C) + P_l(T_H) + P_m(T_{H|h}) as a
/// generating system with layout
///   [ CG Lagrange nodes of T_H | P_l modal per coarse cell | P_m modal per leaf ].
/// Generators are not linearly independent in general; only the represented
/// function is unique.
class EGSpace {
 public:
  /// Throws std::invalid_argument unless 1 <= k <= 2 and -1 <= m <= l <= k.
  EGSpace(std::shared_ptr<const TwoLevelMesh> mesh, int k, int l, int m);

  [[nodiscard]] const TwoLevelMesh& mesh() const { return *mesh_; }
  [[nodiscard]] std::shared_ptr<const TwoLevelMesh> mesh_ptr() const { return mesh_; }
  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] int l() const { return l_; }
  [[nodiscard]] int m() const { return m_; }

  [[nodiscard]] int cg_size() const { return static_cast<int>(cg_nodes_.size()); }
  [[nodiscard]] int l_offset() const { return cg_size(); }
  [[nodiscard]] int m_offset() const { return l_offset() + l_block_size(); }
  [[nodiscard]] int l_block_size() const;
  [[nodiscard]] int m_block_size() const;
  [[nodiscard]] int size() const { return m_offset() + m_block_size(); }

  /// Coordinates of the CG Lagrange nodes.
  [[nodiscard]] const std::vector<Point>& cg_nodes() const { return cg_nodes_; }
  /// Global CG node indices of coarse element e in local Lagrange order.
  [[nodiscard]] std::span<const int> cg_dofs(std::size_t coarse_element) const;

  /// Generators whose support intersects the given leaf.
  [[nodiscard]] std::vector<int> generators_on_leaf(std::size_t leaf) const;
  /// Direct evaluation of generator `gen` at x inside `leaf` (0 if the
  /// generator is not supported there).
  [[nodiscard]] double generator_value(int gen, std::size_t leaf, const Point& x) const;

  /// Exact map from generating-system coefficients to P_k modal coefficients
  /// on the leaves, size (N_leaf * poly_dim(k)) x size().
  [[nodiscard]] const SparseMatrix& leaf_embedding() const { return leaf_embedding_; }
  [[nodiscard]] int leaf_dim() const;

  /// Coefficients of the constant function `value` (carried by the CG block).
  [[nodiscard]] Coefficients constant(double value) const;

 private:
  void build_cg_numbering();
  void build_embedding();

  std::shared_ptr<const TwoLevelMesh> mesh_;
  int k_, l_, m_;
  std::vector<Point> cg_nodes_;
  std::vector<int> cg_dofs_;  // poly_dim(k) per coarse element
  SparseMatrix leaf_embedding_;
};

/// Builds the space; see EGSpace.
[[nodiscard]] std::shared_ptr<const EGSpace> build_space(std::shared_ptr<const TwoLevelMesh> mesh,
                                                         int k, int l, int m);

/// Exact representation of the field in P_k(T_h) (modal, per fine cell of
/// mesh().fine()). Throws std::invalid_argument on dimension mismatch.
[[nodiscard]] BrokenField embed(const EGSpace& space, const Coefficients& coeffs);

/// Representation in P_k over the leaves of T_{H|h}.
[[nodiscard]] BrokenField embed_leaves(const EGSpace& space, const Coefficients& coeffs);

/// Sum over generators supported on `leaf` of coefficient times generator
/// value. Throws std::invalid_argument if x is not inside the leaf or the
/// coefficient length mismatches.
[[nodiscard]] double evaluate(const EGSpace& space, const Coefficients& coeffs, std::size_t leaf,
                              const Point& x);

}  // namespace egadv
