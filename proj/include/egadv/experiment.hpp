#pragma once

#include "egadv/advop.hpp"
#include "egadv/egspace.hpp"
#include "egadv/timestep.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace egadv {

/// L2 error of the discrete field against `exact(t, .)`, integrated over the
/// fine cells of T_h with a rule of exactness 2k+4.
[[nodiscard]] double l2_error(const EGSpace& space, const Coefficients& coeffs,
                              const SpaceTimeFunction& exact, double t);

/// L2 norm of the discrete field (exact, from the leaf modal coefficients).
[[nodiscard]] double l2_norm(const EGSpace& space, const Coefficients& coeffs);

/// Min / max of the field over the cell quadrature points of T_h.
[[nodiscard]] std::pair<double, double> field_range(const EGSpace& space,
                                                    const Coefficients& coeffs);

/// Two-level mesh with every coarse element of the level-R unit square
/// marked to depth r - R. Throws std::invalid_argument if r < R or R < 1.
[[nodiscard]] std::shared_ptr<const TwoLevelMesh> uniform_two_level(int coarse_level,
                                                                    int fine_level);

struct RunRecord {
  int k = 0, l = 0, m = 0;
  int coarse_level = 0;  // R
  int fine_level = 0;    // r
  int dofs = 0;
  double l2_error = 0.0;
  double seconds = 0.0;
  int steps = 0;
};

struct RateRecord {
  RunRecord from, to;
  double rate = 0.0;  // log2(e_from / e_to)
};

struct ExperimentReport {
  std::vector<RunRecord> runs;

  /// Rates between runs of the same space that differ in one level only:
  /// (R, r) -> (R, r + 1) and (R, r) -> (R + 1, r).
  [[nodiscard]] std::vector<RateRecord> rates() const;
  /// CSV with header k,l,m,R,r,dofs,l2_error,seconds.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

enum class RefinementStrategy { table, h_quarter, h_square, fixed_coarse };

/// Parses table | h-quarter | h-square | fixed-H.
[[nodiscard]] RefinementStrategy parse_strategy(const std::string& name);

/// (R, r) pairs visited by a strategy. Mesh widths are H = 2^(1-R),
/// h = 2^(1-r); h = H/4 gives r = R + 2, h = 2H^2 gives r = max(R, 2R - 2)
/// (smallest level with h <= 2H^2), fixed-H uses R = 2. Pairs with r > r_max
/// are dropped.
[[nodiscard]] std::vector<std::pair<int, int>> sweep_levels(RefinementStrategy strategy, int R_max,
                                                            int r_max);

/// Least-squares slope of -log2(error) against level.
[[nodiscard]] double fitted_order(const std::vector<int>& levels, const std::vector<double>& errors);

struct ConvergenceConfig {
  int k = 1, l = 0, m = 0;
  int R_max = 5;
  int r_max = 7;
  RefinementStrategy strategy = RefinementStrategy::table;
  double cfl = 0.1;
};

/// One manufactured-solution run to t = 1/2 with the (k+1)-stage SSP scheme
/// and initial projection pi.
[[nodiscard]] RunRecord run_manufactured(int k, int l, int m, int R, int r, double cfl);

[[nodiscard]] ExperimentReport run_convergence(
    const ConvergenceConfig& config,
    const std::function<void(const RunRecord&)>& on_run = {});

/// Field sampled along a horizontal or vertical line of the unit square.
struct CrossSection {
  bool vertical = true;  // x1 = position if vertical, else x2 = position
  double position = 0.5;
  std::vector<double> s, u_num, u_exact;

  /// CSV with header s,u_num,u_exact.
  void write_csv(const std::string& path) const;
};

[[nodiscard]] CrossSection sample_cross_section(const EGSpace& space, const Coefficients& coeffs,
                                                const ScalarFunction& exact, bool vertical,
                                                double position, int samples = 1024);

struct SolidBodyResult {
  RunRecord record;
  std::shared_ptr<const EGSpace> space;
  Coefficients coefficients;
  double min_value = 0.0, max_value = 0.0;
  std::vector<std::pair<double, double>> norm_history;  // (t, ||U||)
  CrossSection cross_x, cross_y;
};

/// Solid body rotation over one period with piecewise-constant initial data.
[[nodiscard]] SolidBodyResult run_solid_body(int R, int r, double cfl = 0.2, int k = 1, int l = 0,
                                             int m = 0);

/// VTK legacy ASCII unstructured grid of T_h: every fine cell with its own
/// three points, point data U, cell data U_mean (cell average) and depth.
void write_vtk(const EGSpace& space, const Coefficients& coeffs, const std::string& path);

/// VTK legacy ASCII dump of the leaves with cell scalar = refinement depth.
void write_mesh_vtk(const TwoLevelMesh& mesh, const std::string& path);

}  // namespace egadv
