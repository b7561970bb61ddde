#include "egadv/timestep.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <sstream>
#include <string>

namespace egadv {

SSPScheme ssp_scheme(int stages) {
  SSPScheme s;
  s.stages = stages;
  s.order = stages;
  switch (stages) {
    case 2:
      s.alpha = {{1.0}, {0.5, 0.5}};
      s.beta = {{1.0}, {0.0, 0.5}};
      s.c = {0.0, 1.0};
      break;
    case 3:
      s.alpha = {{1.0}, {0.75, 0.25}, {1.0 / 3.0, 0.0, 2.0 / 3.0}};
      s.beta = {{1.0}, {0.0, 0.25}, {0.0, 0.0, 2.0 / 3.0}};
      s.c = {0.0, 1.0, 0.5};
      break;
    default:
      throw std::invalid_argument("SSP Runge-Kutta schemes are available for 2 or 3 stages");
  }
  return s;
}

Eigen::VectorXd ssp_step(const SSPScheme& scheme, const RightHandSide& rhs, double t, double dt,
                         const Eigen::VectorXd& u) {
  std::vector<Eigen::VectorXd> stage{u};
  std::vector<Eigen::VectorXd> deriv;
  stage.reserve(static_cast<std::size_t>(scheme.stages) + 1);
  for (int i = 0; i < scheme.stages; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    deriv.push_back(rhs(t + scheme.c[ii] * dt, stage.back()));
    Eigen::VectorXd next = Eigen::VectorXd::Zero(u.size());
    for (std::size_t j = 0; j <= ii; ++j) {
      if (scheme.alpha[ii][j] != 0.0) next += scheme.alpha[ii][j] * stage[j];
      if (scheme.beta[ii][j] != 0.0) next += (dt * scheme.beta[ii][j]) * deriv[j];
    }
    stage.push_back(std::move(next));
  }
  return stage.back();
}

Coefficients step(const SSPScheme& scheme, const SemiDiscreteSystem& system, double t, double dt,
                  const Coefficients& c) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  return ssp_step(
      scheme,
      [&](double time, const Eigen::VectorXd& u) {
        if (!u.allFinite()) throw InstabilityError("non-finite stage values at t = " + std::to_string(time), time);
        return system.time_derivative(time, u);
      },
      t, dt, c);
}

double stable_time_step(const SemiDiscreteSystem& system, double cfl) {
  if (!(cfl > 0.0)) throw std::invalid_argument("cfl must be positive");
  const double speed = system.max_speed(0.0);
  const double h = system.op().space().mesh().min_leaf_diameter();
  const int k = system.op().space().k();
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * h / ((2 * k + 1) * speed);
}

RunResult run(const SSPScheme& scheme, const SemiDiscreteSystem& system, const Coefficients& c0,
              double t_end, const RunOptions& options) {
  RunResult result{c0, stable_time_step(system, options.cfl), 0};
  if (options.probe) options.probe(0.0, result.coefficients);
  if (t_end <= 0.0) return result;

  const int steps = std::max(1, static_cast<int>(std::ceil(t_end / result.dt - 1e-9)));
  double t = 0.0;
  for (int n = 0; n < steps; ++n) {
    const double dt = n + 1 == steps ? t_end - t : result.dt;
    result.coefficients = step(scheme, system, t, dt, result.coefficients);
    t = n + 1 == steps ? t_end : t + dt;
    ++result.steps;
    if (!result.coefficients.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite coefficients at t = " << t << " after " << result.steps
          << " steps (dt = " << result.dt << "); reduce the cfl number";
      throw InstabilityError(msg.str(), t);
    }
    const bool last = n + 1 == steps;
    if (options.probe && (last || (options.probe_every > 0 && result.steps % options.probe_every == 0))) {
      if (!system.problem().steady_velocity) system.check_inflow(t);
      options.probe(t, result.coefficients);
    }
  }
  if (!system.problem().steady_velocity) system.check_inflow(t_end);
  return result;
}

}  // namespace egadv
