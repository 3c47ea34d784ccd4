#pragma once

#include <optional>

#include "tlbt/horizon.hpp"
#include "tlbt/linalg.hpp"
#include "tlbt/reduced_model.hpp"
#include "tlbt/system.hpp"

namespace tlbt {

/// Matrix exponential terms at the horizon.
/// For E-systems `f` is the generalized E e^{E^{-1}A T} E^{-1} B and
/// `f_state` is e^{E^{-1}A T} E^{-1} B; without E they coincide.
struct HorizonData {
  double horizon = 0.0;
  Matrix f;        // n x m
  Matrix f_state;  // n x m
  Matrix g;        // p x n, C e^{E^{-1}A T}
};

/// Reachability/observability Gramians of (E,) A, B, C on [0, T] or [0, inf).
///
/// `p` and `q` solve the (generalized) Lyapunov equations
///   A P E^T + E P A^T + B B^T - F F^T = 0
///   A^T Q E + E^T Q A + C^T C - G^T G = 0
/// (the exponential terms vanish for an infinite horizon). `q_balancing` is
/// E^T Q E, the observability Gramian the balancing acts on; it equals `q`
/// when E is absent.
struct GramianSet {
  Matrix p;
  Matrix q;
  Matrix q_balancing;
  Horizon horizon = Horizon::infinite();
  std::optional<HorizonData> horizon_data;
  std::optional<Matrix> p_factor;  // Z_P with P ~= Z_P Z_P^T
  std::optional<Matrix> q_factor;  // Z_Q with Q ~= Z_Q Z_Q^T
};

/// P_inf, Q_inf; requires E^{-1} A Hurwitz. Also attaches square Cholesky-type
/// factors computed directly from the Lyapunov equations.
GramianSet infinite_gramians(const StateSpaceSystem& sys);

/// P_T, Q_T by the time-limited Lyapunov equations. Unstable A is allowed as
/// long as Lambda(A) and -Lambda(A) are disjoint.
GramianSet time_limited_gramians(const StateSpaceSystem& sys, double horizon);

GramianSet compute_gramians(const StateSpaceSystem& sys, Horizon horizon);

HorizonData horizon_data(const StateSpaceSystem& sys, double horizon);

/// Attaches low-rank factors of P and Q truncated at relative eigenvalue
/// threshold `tol`.
void attach_factors(GramianSet& g, double tol);

/// Composite 4-point Gauss-Legendre approximation of
///   int_0^T e^{A1 s} B1 B2^T e^{A2^T s} ds.
Matrix quadrature_integral(const Matrix& a1, const Matrix& b1, const Matrix& a2, const Matrix& b2,
                           double horizon, Index panels);

/// Quadrature approximation of P_T (standard-form reachability integral).
Matrix gramian_quadrature_oracle(const StateSpaceSystem& sys, double horizon, Index panels);

/// P_{T,r}: A11 X + X A11^T = -B1 B1^T + F_r F_r^T with F_r = e^{A11 T} B1.
Matrix reduced_gramian(const ReducedModel& rom, Horizon horizon);

/// P_{T,M}: A X + X A11^T = -B B1^T + F_T F_r^T (standard form). For E-systems
/// the same matrix solves A X + E X A11^T = -B B1^T + F^E F_r^T.
Matrix mixed_gramian(const StateSpaceSystem& sys, const ReducedModel& rom, Horizon horizon);

}  // namespace tlbt
