#include "tlbt/balancing.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "tlbt/error.hpp"

namespace tlbt {

namespace {

constexpr double kPsdTolerance = 1e-10;

}  // namespace

BalancingResult balance(const GramianSet& gramians, const StateSpaceSystem& sys, Index r,
                        const BalanceOptions& options) {
  const Index n = sys.n();
  if (gramians.p.rows() != n || gramians.q.rows() != n) {
    throw Error(ErrorCode::Dimension, "Gramians do not match the system dimension");
  }
  const Matrix zp = gramians.p_factor ? *gramians.p_factor
                                      : spd_factor(gramians.p, options.factor_tol, kPsdTolerance);
  Matrix zq;
  if (gramians.q_factor) {
    zq = sys.has_e() ? Matrix(sys.e()->transpose() * *gramians.q_factor) : *gramians.q_factor;
  } else {
    zq = spd_factor(gramians.q_balancing, options.factor_tol, kPsdTolerance);
  }
  if (zp.cols() == 0 || zq.cols() == 0) {
    throw Error(ErrorCode::Degenerate, "a Gramian is zero; nothing to balance");
  }

  Eigen::BDCSVD<Matrix> svd(zq.transpose() * zp, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Index n_hat = 0;
  while (n_hat < sv.size() && sv(n_hat) > options.sv_cutoff * sv(0)) ++n_hat;
  if (n_hat == 0) throw Error(ErrorCode::Degenerate, "all singular values vanish");
  if (r < 1 || r > n_hat) {
    std::ostringstream os;
    os << "reduced order " << r << " out of range; 1 <= r <= n_hat = " << n_hat;
    throw Error(ErrorCode::Order, os.str());
  }

  const Vector inv_sqrt = sv.head(n_hat).cwiseSqrt().cwiseInverse();
  // Bases over all n-hat states; the first r columns give V and W.
  const Matrix v_all = zp * svd.matrixV().leftCols(n_hat) * inv_sqrt.asDiagonal();
  Matrix w_all = zq * svd.matrixU().leftCols(n_hat) * inv_sqrt.asDiagonal();
  if (sys.has_e()) {
    Eigen::PartialPivLU<Matrix> lu(sys.e()->transpose());
    w_all = lu.solve(w_all);
  }

  BalancingResult res;
  res.singular_values = sv.head(n_hat);
  res.v = v_all.leftCols(r);
  res.w = w_all.leftCols(r);
  res.horizon = gramians.horizon;
  res.order = r;
  if (options.full_transform) {
    if (n > options.verification_cap) {
      throw Error(ErrorCode::VerificationUnavailable,
                  "full balancing basis limited to n <= " + std::to_string(options.verification_cap));
    }
    // S maps original to balanced coordinates: x_bal = W^T E x.
    res.s = sys.has_e() ? Matrix(w_all.transpose() * *sys.e()) : Matrix(w_all.transpose());
    res.s_inv = v_all;
  }
  return res;
}

Index select_order(std::span<const double> singular_values, double tau) {
  if (singular_values.empty()) throw Error(ErrorCode::InvalidArgument, "select_order: no singular values");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "select_order: tau must be positive");
  const auto count = static_cast<Index>(singular_values.size());
  // tail(r) = sum_{i > r} sigma_i; accumulate from the back so the sums are exact per r.
  double tail = 0.0;
  Index best = count;
  for (Index r = count - 1; r >= 1; --r) {
    tail += singular_values[static_cast<std::size_t>(r)];
    if (tail <= tau) {
      best = r;
    } else {
      break;
    }
  }
  return best;
}

FullBalancing full_balancing_transform(const Matrix& p, const Matrix& q) {
  require_square(p, "P");
  require_square(q, "Q");
  if (p.rows() != q.rows()) throw Error(ErrorCode::Dimension, "P and Q must have the same size");
  const Index n = p.rows();
  Eigen::LLT<Matrix> llt_p(0.5 * (p + p.transpose()));
  Eigen::LLT<Matrix> llt_q(0.5 * (q + q.transpose()));
  if (llt_p.info() != Eigen::Success || llt_q.info() != Eigen::Success) {
    throw Error(ErrorCode::VerificationUnavailable,
                "full balancing needs positive definite Gramians; use the projection route (balance) instead");
  }
  const Matrix lp = llt_p.matrixL();
  const Matrix lq = llt_q.matrixL();
  Eigen::JacobiSVD<Matrix> svd(lq.transpose() * lp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sigma = svd.singularValues();
  if (!(sigma(n - 1) > 0.0)) {
    throw Error(ErrorCode::VerificationUnavailable,
                "full balancing needs positive definite Gramians; use the projection route (balance) instead");
  }
  const Vector inv_sqrt = sigma.cwiseSqrt().cwiseInverse();
  FullBalancing fb;
  fb.sigma = sigma;
  fb.s = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * lq.transpose();
  fb.s_inv = lp * svd.matrixV() * inv_sqrt.asDiagonal();
  return fb;
}

ReducedModel truncate(const StateSpaceSystem& sys, const BalancingResult& bal) {
  if (bal.v.rows() != sys.n() || bal.w.rows() != sys.n() || bal.v.cols() != bal.w.cols()) {
    throw Error(ErrorCode::Dimension, "balancing result does not match the system");
  }
  ReducedModel rom;
  rom.a11 = bal.w.transpose() * sys.a() * bal.v;
  rom.b1 = bal.w.transpose() * sys.b();
  rom.c1 = sys.c() * bal.v;
  rom.horizon = bal.horizon;
  rom.parent_name = sys.name();
  return rom;
}

}  // namespace tlbt
