#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tlbt/input_signal.hpp"
#include "tlbt/linalg.hpp"
#include "tlbt/reduced_model.hpp"
#include "tlbt/system.hpp"

namespace tlbt {

/// Outputs on the uniform grid t_k = k * dt, k = 0..K, with t_K = t_end.
struct Trajectory {
  std::vector<double> times;
  Matrix outputs;  // p x (K + 1)
  double dt = 0.0;

  std::size_t size() const noexcept { return times.size(); }
};

/// Implicit midpoint rule from x_0 = 0:
///   (E - dt/2 A) x_{k+1} = (E + dt/2 A) x_k + dt B u(t_k + dt/2),  y_k = C x_k.
/// The step matrix is factored once. `t_end` must be an integer multiple of dt
/// (relative mismatch up to 1e-9).
Trajectory simulate(const StateSpaceSystem& sys, const InputSignal& u, double t_end, double dt);
Trajectory simulate(const ReducedModel& rom, const InputSignal& u, double t_end, double dt);

struct OutputError {
  std::vector<double> series;  // ||y_k - y_r,k||_2
  double max_on_horizon = 0.0;  // over grid points with t_k <= horizon
  double max_overall = 0.0;
};

OutputError output_error(const Trajectory& full, const Trajectory& reduced, double horizon);

/// Composite trapezoid of ||u(t)||_2^2 on the grid 0, dt, ..., horizon, square-rooted.
/// The last panel is shortened when the horizon is not a multiple of dt.
double input_l2_norm(const InputSignal& u, double horizon, double dt);

/// CSV "t,y_1,...,y_p", 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace tlbt
