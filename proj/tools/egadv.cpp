// Command-line driver: convergence sweeps, solid-body rotation, self test.

#include "egadv/advop.hpp"
#include "egadv/experiment.hpp"
#include "egadv/problems.hpp"
#include "egadv/projection.hpp"
#include "egadv/timestep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

using namespace egadv;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInstability = 2;

struct ConvergeArgs {
  ConvergenceConfig config;
  std::string strategy = "table";
  std::string out = "convergence.csv";
};

struct RotateArgs {
  int R = 4;
  int r = 4;
  double cfl = 0.2;
  std::string prefix = "rotate";
};

void print_run(const RunRecord& run) {
  std::printf("V%d_%d%d  R=%d r=%d  dofs=%7d  steps=%5d  L2=%.4e  (%.2f s)\n", run.k, run.l, run.m,
              run.coarse_level, run.fine_level, run.dofs, run.steps, run.l2_error, run.seconds);
  std::fflush(stdout);
}

int converge(const ConvergeArgs& args) {
  ConvergenceConfig config = args.config;
  config.strategy = parse_strategy(args.strategy);
  const ExperimentReport report = run_convergence(config, print_run);
  report.write_csv(args.out);
  std::printf("\nrates log2(e_from/e_to):\n");
  for (const RateRecord& rate : report.rates())
    std::printf("  (%d,%d) -> (%d,%d): %.2f\n", rate.from.coarse_level, rate.from.fine_level,
                rate.to.coarse_level, rate.to.fine_level, rate.rate);
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

int rotate(const RotateArgs& args) {
  const SolidBodyResult result = run_solid_body(args.R, args.r, args.cfl);
  print_run(result.record);
  std::printf("min U = %.4f, max U = %.4f, ||U(T)||/||U(0)|| = %.4f\n", result.min_value,
              result.max_value, result.norm_history.back().second / result.norm_history.front().second);
  ExperimentReport report;
  report.runs.push_back(result.record);
  report.write_csv(args.prefix + ".csv");
  write_vtk(*result.space, result.coefficients, args.prefix + ".vtk");
  result.cross_x.write_csv(args.prefix + "_cross_x.csv");
  result.cross_y.write_csv(args.prefix + "_cross_y.csv");
  std::printf("wrote %s.{csv,vtk}, %s_cross_{x,y}.csv\n", args.prefix.c_str(), args.prefix.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// Self test: a quick pass over the structural invariants on small meshes.

ProblemSpec constant_state() {
  ProblemSpec p;
  p.velocity = [](double, const Point&) { return Vector2(1.0, 0.5); };
  p.source = [](double, const Point&) { return 0.0; };
  p.dirichlet = [](double, const Point&) { return 1.0; };
  p.inflow_kind = [](int, const Point&) { return BoundaryKind::dirichlet; };
  p.final_time = 0.25;
  p.steady_velocity = true;
  return p;
}

int selftest() {
  int failures = 0;
  const auto check = [&](const std::string& name, bool ok, double value) {
    std::printf("%s  %-48s %.3e\n", ok ? "PASS" : "FAIL", name.c_str(), value);
    if (!ok) ++failures;
  };
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const auto random_coefficients = [&](int n) {
    Coefficients c(n);
    for (double& v : c) v = uniform(gen);
    return c;
  };

  const auto mesh = std::make_shared<const TwoLevelMesh>(
      build_unit_square_mesh(2), std::vector<int>{0, 1, 2, 0, 0, 1, 0, 0, 2, 0, 0, 1, 0, 0, 0, 0}, 2);
  double area = 0.0;
  for (const Leaf& leaf : mesh->leaves()) area += leaf.geometry.area();
  check("leaf areas sum to 1", std::abs(area - 1.0) < 1e-12, std::abs(area - 1.0));

  for (const auto [k, l, m] : {std::array{1, 0, 0}, std::array{2, 1, 1}}) {
    const std::string tag = "V" + std::to_string(k) + "_" + std::to_string(l) + std::to_string(m) + ": ";
    const auto space = build_space(mesh, k, l, m);
    const auto op = assemble_mass(space);
    const Coefficients one = space->constant(1.0);
    const double measure = one.dot(op->mass() * one);
    check(tag + "constant has unit mass", std::abs(measure - 1.0) < 1e-12, std::abs(measure - 1.0));

    const Coefficients x = random_coefficients(space->size());
    const Coefficients y = solve_mass(*op, op->mass() * x);
    const double solve_err = l2_norm(*space, y - x) / l2_norm(*space, x);
    check(tag + "consistent mass solve", solve_err < 1e-6, solve_err);

    const SemiDiscreteSystem steady(op, constant_state());
    const double drift = l2_norm(*space, steady.time_derivative(0.0, one));
    check(tag + "constant state is stationary", drift < 1e-10, drift);

    ProblemSpec rotation = solid_body_problem();
    const SemiDiscreteSystem spin(op, rotation);
    const double energy = x.dot(spin.residual(0.0, x));
    check(tag + "rotation dissipates energy", energy <= 0.0, energy);

    const Coefficients c0 = project_piecewise_constant(*space, solid_body_initial);
    const double n0 = l2_norm(*space, c0);
    const RunResult run_result = run(ssp_scheme(k + 1), spin, c0, 0.5);
    const double n1 = l2_norm(*space, run_result.coefficients);
    check(tag + "norm does not grow over rotation", n1 <= n0 * (1 + 1e-6), n1 / n0);
  }

  const RunRecord coarse = run_manufactured(1, 0, 0, 2, 2, 0.1);
  const RunRecord fine = run_manufactured(1, 0, 0, 3, 3, 0.1);
  const double rate = std::log2(coarse.l2_error / fine.l2_error);
  check("V1_00 manufactured rate (2,2)->(3,3)", rate > 1.0, rate);

  std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enriched Galerkin transport on two-level meshes"};
  app.set_config("--config", "", "TOML file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  ConvergeArgs conv;
  auto* converge_cmd = app.add_subcommand("converge", "manufactured-solution convergence sweep");
  converge_cmd->add_option("--k", conv.config.k, "polynomial degree of the continuous part")->check(CLI::Range(1, 2));
  converge_cmd->add_option("--l", conv.config.l, "degree of the coarse broken enrichment (-1: none)");
  converge_cmd->add_option("--m", conv.config.m, "degree of the subcell enrichment (-1: none)");
  converge_cmd->add_option("--R-max", conv.config.R_max, "largest coarse level")->check(CLI::Range(1, 8));
  converge_cmd->add_option("--r-max", conv.config.r_max, "largest fine level")->check(CLI::Range(1, 9));
  converge_cmd->add_option("--strategy", conv.strategy, "refinement strategy")
      ->check(CLI::IsMember({"table", "h-quarter", "h-square", "fixed-H"}));
  converge_cmd->add_option("--cfl", conv.config.cfl, "cfl number")->check(CLI::PositiveNumber);
  converge_cmd->add_option("--out", conv.out, "CSV report path");

  RotateArgs rot;
  auto* rotate_cmd = app.add_subcommand("rotate", "solid body rotation over one period");
  rotate_cmd->add_option("--R", rot.R, "coarse level")->check(CLI::Range(1, 8));
  rotate_cmd->add_option("--r", rot.r, "fine level")->check(CLI::Range(1, 9));
  rotate_cmd->add_option("--cfl", rot.cfl, "cfl number")->check(CLI::PositiveNumber);
  rotate_cmd->add_option("--out-prefix", rot.prefix, "output path prefix");

  auto* selftest_cmd = app.add_subcommand("selftest", "quick invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kExitUsage;
  }

  try {
    if (*converge_cmd) {
      if (conv.config.l > conv.config.k || conv.config.m > conv.config.l || conv.config.m < -1)
        throw std::invalid_argument("need -1 <= m <= l <= k");
      return converge(conv);
    }
    if (*rotate_cmd) {
      if (rot.r < rot.R) throw std::invalid_argument("need r >= R");
      return rotate(rot);
    }
    if (*selftest_cmd) return selftest();
  } catch (const InstabilityError& e) {
    std::cerr << "instability: " << e.what() << '\n';
    return kExitInstability;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
