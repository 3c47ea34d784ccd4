#include "tlbt/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "tlbt/error.hpp"
#include "tlbt/io.hpp"

namespace tlbt {

namespace {

Index step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidArgument, "final time must be finite and at least one step");
  }
  const double ratio = t_end / dt;
  const auto k = static_cast<Index>(std::llround(ratio));
  if (std::abs(static_cast<double>(k) * dt - t_end) > 1e-9 * t_end) {
    std::ostringstream os;
    os << "final time " << t_end << " is not a multiple of the step " << dt;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  return k;
}

Trajectory integrate(const Matrix& e, const Matrix& a, const Matrix& b, const Matrix& c,
                     const InputSignal& u, double t_end, double dt) {
  if (u.dimension() != b.cols()) {
    throw Error(ErrorCode::Dimension, "input has " + std::to_string(u.dimension()) +
                                          " channels, system has m = " + std::to_string(b.cols()));
  }
  const Index steps = step_count(t_end, dt);
  const Index n = a.rows();
  const Matrix lhs = e - 0.5 * dt * a;
  const Matrix rhs_matrix = e + 0.5 * dt * a;
  const Matrix b_dt = dt * b;
  Eigen::PartialPivLU<Matrix> lu(lhs);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::Singular, "midpoint step matrix E - dt/2 A is singular");

  Trajectory traj;
  traj.dt = dt;
  traj.times.resize(static_cast<std::size_t>(steps) + 1);
  traj.outputs.resize(c.rows(), steps + 1);
  Vector x = Vector::Zero(n);
  Vector rhs(n);
  traj.times[0] = 0.0;
  traj.outputs.col(0).setZero();
  for (Index k = 0; k < steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * dt;
    const Vector uk = u(t_mid);
    if (!uk.allFinite()) throw Error(ErrorCode::Numerical, "input is not finite at t = " + std::to_string(t_mid));
    rhs.noalias() = rhs_matrix * x;
    rhs.noalias() += b_dt * uk;
    x = lu.solve(rhs);
    traj.times[static_cast<std::size_t>(k) + 1] = static_cast<double>(k + 1) * dt;
    traj.outputs.col(k + 1).noalias() = c * x;
  }
  if (!traj.outputs.allFinite()) throw Error(ErrorCode::Numerical, "simulation produced non-finite outputs");
  return traj;
}

}  // namespace

Trajectory simulate(const StateSpaceSystem& sys, const InputSignal& u, double t_end, double dt) {
  return integrate(sys.e_or_identity(), sys.a(), sys.b(), sys.c(), u, t_end, dt);
}

Trajectory simulate(const ReducedModel& rom, const InputSignal& u, double t_end, double dt) {
  const Index r = rom.order();
  return integrate(Matrix::Identity(r, r), rom.a11, rom.b1, rom.c1, u, t_end, dt);
}

OutputError output_error(const Trajectory& full, const Trajectory& reduced, double horizon) {
  if (full.times != reduced.times) throw Error(ErrorCode::Dimension, "trajectories use different time grids");
  if (full.outputs.rows() != reduced.outputs.rows()) {
    throw Error(ErrorCode::Dimension, "trajectories have different output counts");
  }
  OutputError err;
  err.series.resize(full.size());
  for (std::size_t k = 0; k < full.size(); ++k) {
    const auto col = static_cast<Index>(k);
    const double e = (full.outputs.col(col) - reduced.outputs.col(col)).norm();
    err.series[k] = e;
    err.max_overall = std::max(err.max_overall, e);
    if (full.times[k] <= horizon) err.max_on_horizon = std::max(err.max_on_horizon, e);
  }
  return err;
}

double input_l2_norm(const InputSignal& u, double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon and dt must be positive");
  double sum = 0.0;
  double t0 = 0.0;
  double f0 = u(0.0).squaredNorm();
  for (Index k = 1;; ++k) {
    double t1 = static_cast<double>(k) * dt;
    if (t1 > horizon * (1.0 - 1e-12)) t1 = horizon;
    const double f1 = u(t1).squaredNorm();
    sum += 0.5 * (t1 - t0) * (f0 + f1);
    if (t1 == horizon) break;
    t0 = t1;
    f0 = f1;
  }
  return std::sqrt(sum);
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t";
  for (Index i = 0; i < traj.outputs.rows(); ++i) os << ",y_" << (i + 1);
  os << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.times[k]);
    for (Index i = 0; i < traj.outputs.rows(); ++i) os << "," << format_double(traj.outputs(i, static_cast<Index>(k)));
    os << "\n";
  }
  return os.str();
}

}  // namespace tlbt
