#pragma once

#include "egadv/advop.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace egadv {

/// Explicit SSP Runge-Kutta scheme in Shu-Osher form:
///   u(0) = u_n,  u(i) = sum_{j<i} alpha[i][j] u(j) + dt beta[i][j] L(t + c[j] dt, u(j)),
///   u_{n+1} = u(s).
struct SSPScheme {
  int stages = 0;
  int order = 0;
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> beta;
  std::vector<double> c;
};

/// stages = 2: Heun (SSP-RK2); stages = 3: Shu-Osher SSP-RK3.
/// Throws std::invalid_argument otherwise.
[[nodiscard]] SSPScheme ssp_scheme(int stages);

using RightHandSide = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// One step for a generic ODE u' = L(t, u).
[[nodiscard]] Eigen::VectorXd ssp_step(const SSPScheme& scheme, const RightHandSide& rhs,
                                       double t, double dt, const Eigen::VectorXd& u);

/// One step of M c' = r(c, t); every stage solves with the mass matrix.
[[nodiscard]] Coefficients step(const SSPScheme& scheme, const SemiDiscreteSystem& system,
                                double t, double dt, const Coefficients& c);

/// Non-finite coefficients during time stepping.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  [[nodiscard]] double time() const { return time_; }

 private:
  double time_;
};

struct RunOptions {
  double cfl = 0.2;
  /// Call the probe every `probe_every` steps (0: only at start and end).
  int probe_every = 0;
  std::function<void(double, const Coefficients&)> probe;
};

struct RunResult {
  Coefficients coefficients;
  double dt = 0.0;
  int steps = 0;
};

/// Time step cfl * h_min / ((2k+1) sup|a|) with sup|a| sampled at t = 0.
[[nodiscard]] double stable_time_step(const SemiDiscreteSystem& system, double cfl);

/// Integrates from t = 0 to t_end with uniform steps, the last one clipped
/// to land on t_end. Throws InstabilityError on non-finite coefficients.
[[nodiscard]] RunResult run(const SSPScheme& scheme, const SemiDiscreteSystem& system,
                            const Coefficients& c0, double t_end, const RunOptions& options = {});

}  // namespace egadv
