#include "egadv/experiment.hpp"

#include "egadv/polybasis.hpp"
#include "egadv/problems.hpp"
#include "egadv/projection.hpp"
#include "egadv/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace egadv {
namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(12);
  return out;
}

}  // namespace

double l2_error(const EGSpace& space, const Coefficients& coeffs, const SpaceTimeFunction& exact,
                double t) {
  const BrokenField fine_field = embed(space, coeffs);
  const CoarseMesh& fine = space.mesh().fine();
  const QuadratureRule& rule = cell_rule(std::min(2 * space.k() + 4, kMaxCellExactness));
  const Eigen::MatrixXd psi = modal_basis(space.k()).tabulate(rule);
  double sum = 0.0;
  for (std::size_t f = 0; f < fine.size(); ++f) {
    const Triangle tri = fine.triangle(f);
    const Eigen::VectorXd values = psi * fine_field.block(f);
    double cell = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double e = values[static_cast<Eigen::Index>(q)] - exact(t, tri.to_physical(rule.points[q]));
      cell += rule.weights[q] * e * e;
    }
    sum += 2.0 * tri.area() * cell;
  }
  return std::sqrt(sum);
}

double l2_norm(const EGSpace& space, const Coefficients& coeffs) {
  const BrokenField u = embed_leaves(space, coeffs);
  double sum = 0.0;
  for (std::size_t l = 0; l < space.mesh().leaf_count(); ++l)
    sum += 2.0 * space.mesh().leaves()[l].geometry.area() * u.block(l).squaredNorm();
  return std::sqrt(sum);
}

std::pair<double, double> field_range(const EGSpace& space, const Coefficients& coeffs) {
  const BrokenField fine_field = embed(space, coeffs);
  const QuadratureRule& rule = cell_rule(std::min(2 * space.k() + 4, kMaxCellExactness));
  const Eigen::MatrixXd psi = modal_basis(space.k()).tabulate(rule);
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (std::size_t f = 0; f < space.mesh().fine().size(); ++f) {
    const Eigen::VectorXd values = psi * fine_field.block(f);
    lo = std::min(lo, values.minCoeff());
    hi = std::max(hi, values.maxCoeff());
  }
  return {lo, hi};
}

std::shared_ptr<const TwoLevelMesh> uniform_two_level(int coarse_level, int fine_level) {
  if (coarse_level < 1 || fine_level < coarse_level)
    throw std::invalid_argument("need 1 <= R <= r, got R=" + std::to_string(coarse_level) +
                                ", r=" + std::to_string(fine_level));
  CoarseMesh coarse = build_unit_square_mesh(coarse_level);
  const int depth = fine_level - coarse_level;
  std::vector<int> marks(coarse.size(), depth);
  return std::make_shared<const TwoLevelMesh>(std::move(coarse), std::move(marks), depth);
}

std::vector<RateRecord> ExperimentReport::rates() const {
  std::map<std::tuple<int, int, int, int, int>, const RunRecord*> index;
  for (const auto& run : runs)
    index[{run.k, run.l, run.m, run.coarse_level, run.fine_level}] = &run;
  std::vector<RateRecord> out;
  for (const auto& run : runs) {
    for (const auto& next : {std::make_pair(run.coarse_level, run.fine_level + 1),
                             std::make_pair(run.coarse_level + 1, run.fine_level)}) {
      auto it = index.find({run.k, run.l, run.m, next.first, next.second});
      if (it == index.end()) continue;
      out.push_back({run, *it->second, std::log2(run.l2_error / it->second->l2_error)});
    }
  }
  return out;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "k,l,m,R,r,dofs,l2_error,seconds\n";
  for (const auto& run : runs)
    out << run.k << ',' << run.l << ',' << run.m << ',' << run.coarse_level << ','
        << run.fine_level << ',' << run.dofs << ',' << std::setprecision(6) << std::scientific
        << run.l2_error << ',' << std::fixed << std::setprecision(3) << run.seconds << '\n'
        << std::defaultfloat;
}

void ExperimentReport::write_csv(const std::string& path) const {
  auto out = open_output(path);
  write_csv(out);
}

RefinementStrategy parse_strategy(const std::string& name) {
  if (name == "table") return RefinementStrategy::table;
  if (name == "h-quarter") return RefinementStrategy::h_quarter;
  if (name == "h-square") return RefinementStrategy::h_square;
  if (name == "fixed-H") return RefinementStrategy::fixed_coarse;
  throw std::invalid_argument("unknown refinement strategy '" + name + "'");
}

std::vector<std::pair<int, int>> sweep_levels(RefinementStrategy strategy, int R_max, int r_max) {
  std::vector<std::pair<int, int>> levels;
  switch (strategy) {
    case RefinementStrategy::table:
      for (int R = 1; R <= R_max; ++R)
        for (int r = R; r <= r_max; ++r) levels.emplace_back(R, r);
      break;
    case RefinementStrategy::h_quarter:
      for (int R = 1; R <= R_max && R + 2 <= r_max; ++R) levels.emplace_back(R, R + 2);
      break;
    case RefinementStrategy::h_square:
      for (int R = 1; R <= R_max; ++R)
        if (const int r = std::max(R, 2 * R - 2); r <= r_max) levels.emplace_back(R, r);
      break;
    case RefinementStrategy::fixed_coarse:
      for (int r = 2; r <= r_max; ++r) levels.emplace_back(2, r);
      break;
  }
  return levels;
}

double fitted_order(const std::vector<int>& levels, const std::vector<double>& errors) {
  if (levels.size() != errors.size() || levels.size() < 2)
    throw std::invalid_argument("fitted_order needs at least two (level, error) pairs");
  const auto n = static_cast<double>(levels.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double x = levels[i], y = -std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunRecord run_manufactured(int k, int l, int m, int R, int r, double cfl) {
  const auto start = std::chrono::steady_clock::now();
  auto space = build_space(uniform_two_level(R, r), k, l, m);
  auto op = assemble_mass(space);
  const ProblemSpec problem = manufactured_problem();
  SemiDiscreteSystem system(op, problem);
  const Coefficients c0 = eg_project_initial(*space, problem.initial);
  RunOptions options;
  options.cfl = cfl;
  const RunResult result = run(ssp_scheme(k + 1), system, c0, problem.final_time, options);
  RunRecord record{k, l, m, R, r, space->size(),
                   l2_error(*space, result.coefficients, manufactured_solution, problem.final_time)};
  record.steps = result.steps;
  record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

ExperimentReport run_convergence(const ConvergenceConfig& config,
                                 const std::function<void(const RunRecord&)>& on_run) {
  ExperimentReport report;
  for (const auto& [R, r] : sweep_levels(config.strategy, config.R_max, config.r_max)) {
    report.runs.push_back(run_manufactured(config.k, config.l, config.m, R, r, config.cfl));
    if (on_run) on_run(report.runs.back());
  }
  return report;
}

void CrossSection::write_csv(const std::string& path) const {
  auto out = open_output(path);
  out << "s,u_num,u_exact\n";
  for (std::size_t i = 0; i < s.size(); ++i) out << s[i] << ',' << u_num[i] << ',' << u_exact[i] << '\n';
}

CrossSection sample_cross_section(const EGSpace& space, const Coefficients& coeffs,
                                  const ScalarFunction& exact, bool vertical, double position,
                                  int samples) {
  CrossSection cs;
  cs.vertical = vertical;
  cs.position = position;
  const BrokenField u = embed_leaves(space, coeffs);
  for (int i = 0; i < samples; ++i) {
    const double s = samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.5;
    const Point x = vertical ? Point(position, s) : Point(s, position);
    const auto leaf = space.mesh().locate(x);
    if (!leaf) throw std::invalid_argument("cross-section point outside the mesh");
    cs.s.push_back(s);
    cs.u_num.push_back(evaluate_broken(space.mesh().leaves()[static_cast<std::size_t>(*leaf)].geometry,
                                       u, static_cast<std::size_t>(*leaf), x));
    cs.u_exact.push_back(exact(x));
  }
  return cs;
}

SolidBodyResult run_solid_body(int R, int r, double cfl, int k, int l, int m) {
  const auto start = std::chrono::steady_clock::now();
  SolidBodyResult out;
  out.space = build_space(uniform_two_level(R, r), k, l, m);
  auto op = assemble_mass(out.space);
  const ProblemSpec problem = solid_body_problem();
  SemiDiscreteSystem system(op, problem);
  const Coefficients c0 = project_piecewise_constant(*out.space, problem.initial);
  RunOptions options;
  options.cfl = cfl;
  options.probe_every = 1;
  options.probe = [&](double t, const Coefficients& c) {
    out.norm_history.emplace_back(t, l2_norm(*out.space, c));
  };
  const RunResult result = run(ssp_scheme(k + 1), system, c0, problem.final_time, options);
  out.coefficients = result.coefficients;
  const auto exact = [](double, const Point& x) { return solid_body_initial(x); };
  out.record = RunRecord{k, l, m, R, r, out.space->size(),
                         l2_error(*out.space, out.coefficients, exact, problem.final_time)};
  out.record.steps = result.steps;
  std::tie(out.min_value, out.max_value) = field_range(*out.space, out.coefficients);
  out.cross_x = sample_cross_section(*out.space, out.coefficients, solid_body_initial, true, 0.5);
  out.cross_y = sample_cross_section(*out.space, out.coefficients, solid_body_initial, false, 0.75);
  out.record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_vtk(const EGSpace& space, const Coefficients& coeffs, const std::string& path) {
  const TwoLevelMesh& mesh = space.mesh();
  const CoarseMesh& fine = mesh.fine();
  const BrokenField u = embed(space, coeffs);
  const ReferenceBasis& basis = modal_basis(space.k());
  const std::array<Point, 3> corners{Point(0, 0), Point(1, 0), Point(0, 1)};
  auto out = open_output(path);
  const std::size_t n = fine.size();
  out << "# vtk DataFile Version 3.0\nenriched Galerkin solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 3 * n << " double\n";
  for (std::size_t f = 0; f < n; ++f) {
    const Triangle t = fine.triangle(f);
    for (const Point& p : t.v) out << p.x() << ' ' << p.y() << " 0\n";
  }
  out << "CELLS " << n << ' ' << 4 * n << '\n';
  for (std::size_t f = 0; f < n; ++f) out << "3 " << 3 * f << ' ' << 3 * f + 1 << ' ' << 3 * f + 2 << '\n';
  out << "CELL_TYPES " << n << '\n';
  for (std::size_t f = 0; f < n; ++f) out << "5\n";
  out << "POINT_DATA " << 3 * n << "\nSCALARS U double 1\nLOOKUP_TABLE default\n";
  for (std::size_t f = 0; f < n; ++f)
    for (const Point& xi : corners) out << basis.eval(xi).dot(u.block(f)) << '\n';
  out << "CELL_DATA " << n << "\nSCALARS U_mean double 1\nLOOKUP_TABLE default\n";
  // The first modal function is the constant sqrt(2).
  for (std::size_t f = 0; f < n; ++f) out << std::sqrt(2.0) * u.block(f)[0] << '\n';
  out << "SCALARS depth int 1\nLOOKUP_TABLE default\n";
  for (std::size_t f = 0; f < n; ++f)
    out << mesh.leaves()[static_cast<std::size_t>(mesh.leaf_of_fine(f))].depth << '\n';
}

void write_mesh_vtk(const TwoLevelMesh& mesh, const std::string& path) {
  auto out = open_output(path);
  const std::size_t n = mesh.leaf_count();
  out << "# vtk DataFile Version 3.0\ntwo-level mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 3 * n << " double\n";
  for (const Leaf& leaf : mesh.leaves())
    for (const Point& p : leaf.geometry.v) out << p.x() << ' ' << p.y() << " 0\n";
  out << "CELLS " << n << ' ' << 4 * n << '\n';
  for (std::size_t l = 0; l < n; ++l) out << "3 " << 3 * l << ' ' << 3 * l + 1 << ' ' << 3 * l + 2 << '\n';
  out << "CELL_TYPES " << n << '\n';
  for (std::size_t l = 0; l < n; ++l) out << "5\n";
  out << "CELL_DATA " << n << "\nSCALARS depth int 1\nLOOKUP_TABLE default\n";
  for (const Leaf& leaf : mesh.leaves()) out << leaf.depth << '\n';
}

}  // namespace egadv
