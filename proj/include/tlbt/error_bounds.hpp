#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "tlbt/balancing.hpp"
#include "tlbt/gramians.hpp"
#include "tlbt/horizon.hpp"
#include "tlbt/linalg.hpp"
#include "tlbt/reduced_model.hpp"
#include "tlbt/system.hpp"

namespace tlbt {

/// Terms of the balanced-coordinate representation of epsilon^2:
///   eps^2 = tr(Sigma_2 (B_2 B_2^T + 2 P_{M,2} A_21^T))          (leading)
///         - 2 tr(G_1^T G P_M) + tr(G_1^T G_1 P_r) + tr(F_1 F_1^T Sigma_1)  (remainder)
///         - tr((F_1 - F_r)(F_1 - F_r)^T Sigma_1)                  (last)
struct AltRepresentation {
  double leading = 0.0;
  double remainder = 0.0;
  double last = 0.0;
  double eps2 = 0.0;         // leading + remainder + last
  double discrepancy = 0.0;  // |eps2 - radicand of the direct form|
};

/// Output error bound max_{t in [0,T]} ||y - y_r||_2 <= epsilon ||u||_{L2(0,T)}
/// with epsilon^2 = tr(C P C^T) + tr(C1 P_r C1^T) - 2 tr(C P_M C1^T).
struct BoundReport {
  double epsilon = 0.0;
  double radicand = 0.0;  // epsilon^2 before clamping tiny negatives to zero
  double term_cpc = 0.0;
  double term_cprc = 0.0;
  double term_cpmc = 0.0;
  Horizon horizon = Horizon::infinite();
  Index order = 0;
  /// Set when the radicand fell below 1e-8 * term_cpc: the trace formula has
  /// then lost most of its digits to cancellation and epsilon^2 is taken from
  /// output_error_energy instead.
  bool quadrature = false;
  double eps2_quadrature = 0.0;
  std::optional<AltRepresentation> alt;
};

/// int_0^T ||C e^{As} B - C1 e^{A11 s} B1||_F^2 ds (standard form), the exact
/// value of epsilon^2, by Gauss-Legendre on panels graded towards s = 0 and
/// refined until two resolutions agree to 1e-6 relative. An infinite horizon needs
/// both A and A11 Hurwitz.
double output_error_energy(const StateSpaceSystem& sys, const ReducedModel& rom, Horizon horizon);

/// Direct bound. `p` is the (time-limited) reachability Gramian of `sys`.
/// Checks Lambda(A11) vs -Lambda(A11) and Lambda(A) vs -Lambda(A11).
BoundReport tlbt_h2_bound(const StateSpaceSystem& sys, const ReducedModel& rom, const Matrix& p,
                          Horizon horizon);

/// Same bound with tr(C P C^T) replaced by ||C Z_P||_F^2 for a factor P ~= Z_P Z_P^T.
BoundReport tlbt_h2_bound_lowrank(const StateSpaceSystem& sys, const ReducedModel& rom,
                                  const Matrix& z_p, Horizon horizon);

/// Balances `sys` with `gramians` at order r, then evaluates both the direct
/// form and the balanced-coordinate form. The balancing basis spans the n-hat
/// numerically nonzero singular directions, which is the full transformation
/// whenever both Gramians are definite.
BoundReport tlbt_h2_bound_alt(const StateSpaceSystem& sys, const GramianSet& gramians, Index r,
                              const BalanceOptions& options = {});

struct RemainderDiagnostics {
  double norm_f1 = 0.0;       // ||F_{T,1}||_F
  double norm_g1 = 0.0;       // ||G_{T,1}||_F
  double norm_g = 0.0;        // ||G_T||_F
  double norm_pm = 0.0;       // ||P_{T,M}||_F
  double trace_sigma1 = 0.0;  // tr(Sigma_{T,1})
  double trace_pr = 0.0;      // tr(P_{T,r})
  /// The three summands tr(G_1^T G P_M), tr(F_1 F_1^T Sigma_1), tr(G_1^T G_1 P_r).
  std::array<double, 3> summands{};
  /// Their bounds ||G_1|| ||G|| ||P_M||, ||F_1||^2 tr(Sigma_1), ||G_1||^2 tr(P_r).
  std::array<double, 3> upper_bounds{};
  double remainder = 0.0;
  /// 2 * upper_bounds[0] + upper_bounds[1] + upper_bounds[2] >= |remainder|.
  double remainder_bound = 0.0;
};

RemainderDiagnostics remainder_diagnostics(const StateSpaceSystem& sys, const GramianSet& gramians,
                                           Index r, const BalanceOptions& options = {});

/// 2 (sigma_{r+1} + ... + sigma_n); r may be 0.
double bt_hinf_bound(std::span<const double> hankel_values, Index r);

/// tr(Sigma_2 (B_2 B_2^T + 2 P_{inf,M,2} A_21^T)) from infinite-horizon balancing.
double bt_h2_bound_infinite(const StateSpaceSystem& sys, const GramianSet& gramians, Index r,
                            const BalanceOptions& options = {});

/// max over the given frequencies of sigma_max(G(i w) - G_r(i w)).
double hinf_error_sampled(const StateSpaceSystem& sys, const ReducedModel& rom,
                          std::span<const double> frequencies);

/// JSON object with lower_snake_case field names.
std::string to_json(const BoundReport& report);
std::string to_json(const RemainderDiagnostics& diag);

}  // namespace tlbt
