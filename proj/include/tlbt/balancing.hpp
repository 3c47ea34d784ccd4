#pragma once

#include <optional>
#include <span>

#include "tlbt/gramians.hpp"
#include "tlbt/horizon.hpp"
#include "tlbt/linalg.hpp"
#include "tlbt/reduced_model.hpp"
#include "tlbt/system.hpp"

namespace tlbt {

struct BalanceOptions {
  /// Relative eigenvalue cutoff when factoring Gramians that carry no
  /// precomputed factor.
  double factor_tol = 1e-15;
  /// Singular values below sv_cutoff * sigma_1 do not count towards n-hat.
  double sv_cutoff = 1e-14;
  /// Also return the balancing basis over all n-hat states (S, S_inv).
  bool full_transform = false;
  /// Largest n for which the full basis is formed.
  Index verification_cap = 500;
};

/// Square-root balancing. With Z_P, Z_Q factors of P and E^T Q E and the SVD
/// Z_Q^T Z_P = U Sigma V^T, the projection bases are
///   V = Z_P V_1 Sigma_1^{-1/2},  W = E^{-T} Z_Q U_1 Sigma_1^{-1/2},
/// so that W^T E V = I_r.
struct BalancingResult {
  Vector singular_values;  // all n-hat retained values, nonincreasing
  Matrix v;                // n x r
  Matrix w;                // n x r
  /// n-hat x n and n x n-hat with S * S_inv = I. When n-hat = n this is the
  /// full balancing transformation.
  std::optional<Matrix> s;
  std::optional<Matrix> s_inv;
  Horizon horizon = Horizon::infinite();
  Index order = 0;

  Index n_hat() const noexcept { return singular_values.size(); }
};

BalancingResult balance(const GramianSet& gramians, const StateSpaceSystem& sys, Index r,
                        const BalanceOptions& options = {});

/// Tail-sum order selection: smallest r >= 1 with sum_{i>r} sigma_i <= tau.
Index select_order(std::span<const double> singular_values, double tau);

struct FullBalancing {
  Matrix s;
  Matrix s_inv;
  Vector sigma;
};

/// S with S P S^T = S^{-T} Q S^{-1} = diag(sigma), from Cholesky factors of
/// positive definite P and Q. Rank-deficient input is rejected.
FullBalancing full_balancing_transform(const Matrix& p, const Matrix& q);

/// A11 = W^T A V, B1 = W^T B, C1 = C V.
ReducedModel truncate(const StateSpaceSystem& sys, const BalancingResult& bal);

}  // namespace tlbt
