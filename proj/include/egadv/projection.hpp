#pragma once

#include "egadv/egspace.hpp"
#include "egadv/geometry.hpp"
#include "egadv/mesh.hpp"
#include "egadv/quadrature.hpp"

#include <span>
#include <vector>

namespace egadv {

/// Element-wise L2 projection onto P_r over the given cells, with the
/// quadrature rule of the given exactness on every cell.
[[nodiscard]] BrokenField l2_project_broken(std::span<const Triangle> cells, int degree,
                                            const ScalarFunction& v,
                                            int exactness = kMaxCellExactness);

/// Same, over the triangles of a conforming mesh.
[[nodiscard]] BrokenField l2_project_broken(const CoarseMesh& mesh, int degree,
                                            const ScalarFunction& v,
                                            int exactness = kMaxCellExactness);

/// Leaf geometries of a two-level mesh, in leaf order.
[[nodiscard]] std::vector<Triangle> leaf_triangles(const TwoLevelMesh& mesh);

/// Coefficients of a member of P_l(T_H) + P_m(T_{H|h}): modal P_l blocks per
/// coarse element followed by modal P_m blocks per leaf (the enrichment part
/// of the EGSpace layout).
struct SumSpaceField {
  int l = -1;
  int m = -1;
  Eigen::VectorXd coarse;
  Eigen::VectorXd leaf;
};

/// Value of a sum-space field at x inside `leaf`.
[[nodiscard]] double evaluate_sum(const TwoLevelMesh& mesh, const SumSpaceField& field,
                                  std::size_t leaf, const Point& x);

/// L2 projection onto P_l(T_H) + P_m(T_{H|h}), computed independently on each
/// coarse element. The redundant local system is reduced to its P_l Schur
/// complement, which is solved by an eigenvalue pseudo-inverse (relative
/// cutoff 1e-12). Inner products use per-leaf quadrature of the given
/// exactness. Throws std::invalid_argument when l and m are both -1.
[[nodiscard]] SumSpaceField l2_project_sum(const TwoLevelMesh& mesh, int l, int m,
                                           const ScalarFunction& v,
                                           int exactness = kMaxCellExactness);

/// Nodal interpolant onto P_k(T_H) cap C(Omega); values at EGSpace::cg_nodes.
[[nodiscard]] Eigen::VectorXd interpolate_cg(const EGSpace& space, const ScalarFunction& v);

/// Initial projection: CG block = nodal interpolant I v, enrichment blocks =
/// sum-space projection of v - I v. Inner products use leaf quadrature of
/// exactness 2k+4.
[[nodiscard]] Coefficients eg_project_initial(const EGSpace& space, const ScalarFunction& v);

/// Piecewise-constant L2 projection on the leaves placed into the constant
/// mode of the P_m leaf block. Throws std::invalid_argument if m < 0.
[[nodiscard]] Coefficients project_piecewise_constant(const EGSpace& space,
                                                      const ScalarFunction& v,
                                                      int exactness = kMaxCellExactness);

}  // namespace egadv
