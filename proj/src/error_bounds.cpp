#include "tlbt/error_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <complex>
#include <limits>
#include <sstream>

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "tlbt/error.hpp"

namespace tlbt {

namespace {

// Relative window (w.r.t. tr(C P C^T)) in which a negative radicand is rounding noise.
constexpr double kRadicandClamp = 1e-12;

void check_hypotheses(const Matrix& a, const Matrix& a11) {
  const SpectrumSeparation self = spectrum_separation(a11, a11);
  if (!self.is_separated) {
    std::ostringstream os;
    os << "bound hypothesis violated: Lambda(A11) and -Lambda(A11) intersect (min |lambda + mu| = "
       << self.min_sum_abs << ")";
    throw Error(ErrorCode::NotSeparated, os.str());
  }
  const SpectrumSeparation mixed = spectrum_separation(a, a11);
  if (!mixed.is_separated) {
    std::ostringstream os;
    os << "bound hypothesis violated: Lambda(A) and -Lambda(A11) intersect (min |lambda + mu| = "
       << mixed.min_sum_abs << ")";
    throw Error(ErrorCode::NotSeparated, os.str());
  }
}

// Below this fraction of term_cpc the radicand is dominated by cancellation.
constexpr double kRefineBelow = 1e-8;

void finish_epsilon(BoundReport& rep, const StateSpaceSystem* std_sys = nullptr,
                    const ReducedModel* rom = nullptr) {
  rep.radicand = rep.term_cpc + rep.term_cprc - 2.0 * rep.term_cpmc;
  if (rep.radicand < -kRadicandClamp * std::abs(rep.term_cpc)) {
    std::ostringstream os;
    os << "error bound radicand " << rep.radicand << " is negative beyond rounding (tr(C P C^T) = "
       << rep.term_cpc << ")";
    throw Error(ErrorCode::Numerical, os.str());
  }
  rep.epsilon = std::sqrt(std::max(rep.radicand, 0.0));
  if (std_sys == nullptr || rom == nullptr) return;
  if (!(rep.radicand < kRefineBelow * std::abs(rep.term_cpc))) return;
  if (rep.horizon.is_infinite() &&
      (spectral_abscissa(std_sys->a()) >= 0.0 || (rom->order() > 0 && spectral_abscissa(rom->a11) >= 0.0))) {
    return;
  }
  rep.eps2_quadrature = output_error_energy(*std_sys, *rom, rep.horizon);
  rep.quadrature = true;
  rep.epsilon = std::sqrt(rep.eps2_quadrature);
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

// Impulse response C e^{At} B; symmetric A goes through one eigendecomposition.
class ImpulseResponse {
 public:
  ImpulseResponse(const Matrix& a, const Matrix& b, const Matrix& c) : a_(a), b_(b), c_(c) {
    if (a.rows() > 0 && a.isApprox(a.transpose(), 0.0)) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(a);
      if (es.info() == Eigen::Success) {
        lambda_ = es.eigenvalues();
        cx_ = c * es.eigenvectors();
        xb_ = es.eigenvectors().transpose() * b;
        symmetric_ = true;
      }
    }
  }

  Matrix operator()(double t) const {
    if (a_.rows() == 0) return Matrix::Zero(c_.rows(), b_.cols());
    if (symmetric_) return cx_ * (lambda_ * t).array().exp().matrix().asDiagonal() * xb_;
    return c_ * (expm(a_, t) * b_);
  }

 private:
  Matrix a_, b_, c_;
  bool symmetric_ = false;
  Vector lambda_;
  Matrix cx_, xb_;
};

struct Energies {
  double error = 0.0;
  double full = 0.0;
};

Energies graded_energy(const ImpulseResponse& full, const ImpulseResponse& reduced, double horizon,
                       Index levels, Index sub) {
  Energies e;
  double hi = horizon;
  for (Index l = 0; l <= levels; ++l) {
    const double lo = l == levels ? 0.0 : 0.5 * hi;
    const double w = (hi - lo) / static_cast<double>(sub);
    for (Index k = 0; k < sub; ++k) {
      const double a = lo + static_cast<double>(k) * w;
      for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
        const double t = a + 0.5 * w * (1.0 + kGlNodes[q]);
        const Matrix y = full(t);
        const double wq = 0.5 * w * kGlWeights[q];
        e.error += wq * (y - reduced(t)).squaredNorm();
        e.full += wq * y.squaredNorm();
      }
    }
    hi = lo;
  }
  return e;
}

// Reduced and mixed terms shared by the direct and low-rank forms.
struct ReducedTerms {
  Matrix p_r;
  Matrix p_m;
};

ReducedTerms reduced_terms(const StateSpaceSystem& std_sys, const ReducedModel& rom, Horizon horizon,
                           BoundReport& rep) {
  if (rom.b1.cols() != std_sys.m() || rom.c1.rows() != std_sys.p() || rom.order() > std_sys.n()) {
    throw Error(ErrorCode::Dimension, "reduced model does not match the system");
  }
  check_hypotheses(std_sys.a(), rom.a11);
  ReducedTerms t{reduced_gramian(rom, horizon), mixed_gramian(std_sys, rom, horizon)};
  rep.term_cprc = (rom.c1 * t.p_r * rom.c1.transpose()).trace();
  rep.term_cpmc = (std_sys.c() * t.p_m * rom.c1.transpose()).trace();
  rep.horizon = horizon;
  rep.order = rom.order();
  return t;
}

// Balanced-coordinate quantities at order r over the n-hat retained states.
struct BalancedSplit {
  StateSpaceSystem std_sys;
  ReducedModel rom;
  Vector sigma;  // n-hat values
  Index r = 0;
  Matrix a21;    // (n_hat - r) x r
  Matrix b2;     // (n_hat - r) x m
  Matrix p_r;
  Matrix p_m;    // original coordinates, n x r
  Matrix p_m2;   // last n_hat - r rows of S P_M
  Matrix f1;     // first r rows of S F_T
  Matrix fr;     // e^{A11 T} B1
  Matrix g1;     // first r columns of G_T S^{-1}
  Matrix g;      // G_T
};

BalancedSplit balanced_split(const StateSpaceSystem& sys, const GramianSet& gramians, Index r,
                             BalanceOptions options) {
  options.full_transform = true;
  const BalancingResult bal = balance(gramians, sys, r, options);
  const Matrix& s = *bal.s;
  const Matrix& s_inv = *bal.s_inv;
  const Index n_hat = bal.n_hat();

  BalancedSplit out{sys.standard_form(), {}, bal.singular_values, r, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  const StateSpaceSystem& ss = out.std_sys;
  const Matrix ab = s * ss.a() * s_inv;
  const Matrix bb = s * ss.b();
  const Matrix cb = ss.c() * s_inv;
  out.rom.a11 = ab.topLeftCorner(r, r);
  out.rom.b1 = bb.topRows(r);
  out.rom.c1 = cb.leftCols(r);
  out.rom.horizon = gramians.horizon;
  out.rom.parent_name = sys.name();
  out.a21 = ab.bottomLeftCorner(n_hat - r, r);
  out.b2 = bb.bottomRows(n_hat - r);

  check_hypotheses(ss.a(), out.rom.a11);
  out.p_r = reduced_gramian(out.rom, gramians.horizon);
  out.p_m = mixed_gramian(ss, out.rom, gramians.horizon);
  out.p_m2 = (s * out.p_m).bottomRows(n_hat - r);

  if (gramians.horizon.is_infinite()) {
    out.f1 = Matrix::Zero(r, ss.m());
    out.fr = Matrix::Zero(r, ss.m());
    out.g = Matrix::Zero(ss.p(), ss.n());
    out.g1 = Matrix::Zero(ss.p(), r);
  } else {
    const HorizonData hd = gramians.horizon_data ? *gramians.horizon_data
                                                 : horizon_data(sys, gramians.horizon.value());
    out.f1 = (s * hd.f_state).topRows(r);
    out.fr = expm(out.rom.a11, gramians.horizon.value()) * out.rom.b1;
    out.g = hd.g;
    out.g1 = (hd.g * s_inv).leftCols(r);
  }
  return out;
}

double leading_term(const BalancedSplit& b) {
  const Index tail = b.sigma.size() - b.r;
  if (tail == 0) return 0.0;
  const Vector sigma2 = b.sigma.tail(tail);
  const Matrix inner = b.b2 * b.b2.transpose() + 2.0 * b.p_m2 * b.a21.transpose();
  return (sigma2.asDiagonal() * inner).trace();
}

}  // namespace

BoundReport tlbt_h2_bound(const StateSpaceSystem& sys, const ReducedModel& rom, const Matrix& p,
                          Horizon horizon) {
  if (p.rows() != sys.n() || p.cols() != sys.n()) {
    throw Error(ErrorCode::Dimension, "reachability Gramian does not match the system");
  }
  const StateSpaceSystem ss = sys.standard_form();
  BoundReport rep;
  reduced_terms(ss, rom, horizon, rep);
  rep.term_cpc = (ss.c() * p * ss.c().transpose()).trace();
  finish_epsilon(rep, &ss, &rom);
  return rep;
}

BoundReport tlbt_h2_bound_lowrank(const StateSpaceSystem& sys, const ReducedModel& rom,
                                  const Matrix& z_p, Horizon horizon) {
  if (z_p.rows() != sys.n()) throw Error(ErrorCode::Dimension, "Gramian factor does not match the system");
  const StateSpaceSystem ss = sys.standard_form();
  BoundReport rep;
  reduced_terms(ss, rom, horizon, rep);
  rep.term_cpc = (ss.c() * z_p).squaredNorm();
  finish_epsilon(rep);
  return rep;
}

BoundReport tlbt_h2_bound_alt(const StateSpaceSystem& sys, const GramianSet& gramians, Index r,
                              const BalanceOptions& options) {
  const BalancedSplit b = balanced_split(sys, gramians, r, options);
  const StateSpaceSystem& ss = b.std_sys;

  BoundReport rep;
  rep.horizon = gramians.horizon;
  rep.order = r;
  rep.term_cpc = (ss.c() * gramians.p * ss.c().transpose()).trace();
  rep.term_cprc = (b.rom.c1 * b.p_r * b.rom.c1.transpose()).trace();
  rep.term_cpmc = (ss.c() * b.p_m * b.rom.c1.transpose()).trace();
  finish_epsilon(rep, &ss, &b.rom);

  const Vector sigma1 = b.sigma.head(r);
  AltRepresentation alt;
  alt.leading = leading_term(b);
  alt.remainder = -2.0 * (b.g1.transpose() * b.g * b.p_m).trace() +
                  (b.g1.transpose() * b.g1 * b.p_r).trace() +
                  (b.f1 * b.f1.transpose() * sigma1.asDiagonal()).trace();
  const Matrix df = b.f1 - b.fr;
  alt.last = -(df * df.transpose() * sigma1.asDiagonal()).trace();
  alt.eps2 = alt.leading + alt.remainder + alt.last;
  alt.discrepancy = std::abs(alt.eps2 - rep.radicand);
  rep.alt = alt;
  return rep;
}

double output_error_energy(const StateSpaceSystem& sys, const ReducedModel& rom, Horizon horizon) {
  const StateSpaceSystem ss = sys.standard_form();
  if (rom.b1.cols() != ss.m() || rom.c1.rows() != ss.p() || rom.c1.cols() != rom.order()) {
    throw Error(ErrorCode::Dimension, "reduced model does not match the system");
  }
  double rho = norm2(ss.a());
  if (rom.order() > 0) rho = std::max(rho, norm2(rom.a11));
  double t_end = horizon.value();
  if (horizon.is_infinite()) {
    double alpha = spectral_abscissa(ss.a());
    if (rom.order() > 0) alpha = std::max(alpha, spectral_abscissa(rom.a11));
    if (!(alpha < 0.0)) throw Error(ErrorCode::Unstable, "infinite-horizon error energy needs Hurwitz A and A11");
    // e^{2 alpha t} < 1e-34 beyond this point.
    t_end = 40.0 / -alpha;
  }
  // Dyadic levels down to a panel width ~1e-3 / ||A||; sub-panels per level are doubled until converged.
  const double span = std::max(t_end * rho, 1.0);
  const auto levels = static_cast<Index>(std::clamp(std::ceil(std::log2(span)) + 10.0, 4.0, 80.0));
  const ImpulseResponse full(ss.a(), ss.b(), ss.c());
  const ImpulseResponse reduced(rom.a11, rom.b1, rom.c1);
  // Rounding in the two responses limits the relative accuracy of the difference to
  // roughly 1e-7; the absolute floor covers an error that vanishes altogether.
  Energies prev = graded_energy(full, reduced, t_end, levels, 1);
  for (Index sub = 2; sub <= 64; sub *= 2) {
    const Energies cur = graded_energy(full, reduced, t_end, levels, sub);
    if (std::abs(cur.error - prev.error) <= 1e-6 * cur.error + 1e-20 * cur.full) return cur.error;
    prev = cur;
  }
  throw Error(ErrorCode::Numerical, "error energy quadrature did not converge");
}

RemainderDiagnostics remainder_diagnostics(const StateSpaceSystem& sys, const GramianSet& gramians,
                                           Index r, const BalanceOptions& options) {
  const BalancedSplit b = balanced_split(sys, gramians, r, options);
  const Vector sigma1 = b.sigma.head(r);
  RemainderDiagnostics d;
  d.norm_f1 = b.f1.norm();
  d.norm_g1 = b.g1.norm();
  d.norm_g = b.g.norm();
  d.norm_pm = b.p_m.norm();
  d.trace_sigma1 = sigma1.sum();
  d.trace_pr = b.p_r.trace();
  d.summands = {(b.g1.transpose() * b.g * b.p_m).trace(),
                (b.f1 * b.f1.transpose() * sigma1.asDiagonal()).trace(),
                (b.g1.transpose() * b.g1 * b.p_r).trace()};
  d.upper_bounds = {d.norm_g1 * d.norm_g * d.norm_pm, d.norm_f1 * d.norm_f1 * d.trace_sigma1,
                    d.norm_g1 * d.norm_g1 * d.trace_pr};
  d.remainder = -2.0 * d.summands[0] + d.summands[1] + d.summands[2];
  d.remainder_bound = 2.0 * d.upper_bounds[0] + d.upper_bounds[1] + d.upper_bounds[2];
  return d;
}

double bt_hinf_bound(std::span<const double> hankel_values, Index r) {
  const auto n = static_cast<Index>(hankel_values.size());
  if (r < 0 || r > n) {
    throw Error(ErrorCode::Order, "bt_hinf_bound: r = " + std::to_string(r) + " exceeds " + std::to_string(n) + " values");
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double v : hankel_values) {
    if (!(v > 0.0) || v > prev) {
      throw Error(ErrorCode::InvalidArgument, "bt_hinf_bound: values must be positive and nonincreasing");
    }
    prev = v;
  }
  double tail = 0.0;
  for (Index i = n - 1; i >= r; --i) tail += hankel_values[static_cast<std::size_t>(i)];
  return 2.0 * tail;
}

double bt_h2_bound_infinite(const StateSpaceSystem& sys, const GramianSet& gramians, Index r,
                            const BalanceOptions& options) {
  if (!gramians.horizon.is_infinite()) {
    throw Error(ErrorCode::InvalidArgument, "bt_h2_bound_infinite needs infinite-horizon Gramians");
  }
  return leading_term(balanced_split(sys, gramians, r, options));
}

double hinf_error_sampled(const StateSpaceSystem& sys, const ReducedModel& rom,
                          std::span<const double> frequencies) {
  using CMatrix = Eigen::MatrixXcd;
  if (rom.b1.cols() != sys.m() || rom.c1.rows() != sys.p()) {
    throw Error(ErrorCode::Dimension, "reduced model does not match the system");
  }
  const std::complex<double> i_unit(0.0, 1.0);
  const CMatrix e = sys.e_or_identity().cast<std::complex<double>>();
  const CMatrix a = sys.a().cast<std::complex<double>>();
  const CMatrix ar = rom.a11.cast<std::complex<double>>();
  const CMatrix ir = CMatrix::Identity(rom.order(), rom.order());
  double worst = 0.0;
  for (double w : frequencies) {
    Eigen::PartialPivLU<CMatrix> lu(i_unit * w * e - a);
    Eigen::PartialPivLU<CMatrix> lur(i_unit * w * ir - ar);
    if (!(lu.rcond() > 1e-14) || !(lur.rcond() > 1e-14)) {
      throw Error(ErrorCode::Singular, "transfer function evaluation: i*omega is (nearly) an eigenvalue at omega = " +
                                           std::to_string(w));
    }
    const CMatrix g = sys.c().cast<std::complex<double>>() * lu.solve(sys.b().cast<std::complex<double>>());
    const CMatrix gr = rom.c1.cast<std::complex<double>>() * lur.solve(rom.b1.cast<std::complex<double>>());
    Eigen::JacobiSVD<CMatrix> svd(g - gr);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

std::string to_json(const BoundReport& report) {
  nlohmann::json j;
  j["epsilon"] = report.epsilon;
  j["epsilon_squared"] = report.radicand;
  j["term_cpc"] = report.term_cpc;
  j["term_cprc"] = report.term_cprc;
  j["term_cpmc"] = report.term_cpmc;
  j["horizon"] = report.horizon.is_infinite() ? nlohmann::json(nullptr) : nlohmann::json(report.horizon.value());
  j["r"] = report.order;
  j["epsilon_method"] = report.quadrature ? "quadrature" : "gramian";
  if (report.quadrature) j["epsilon_squared_quadrature"] = report.eps2_quadrature;
  if (report.alt) {
    j["alt_leading"] = report.alt->leading;
    j["alt_remainder"] = report.alt->remainder;
    j["alt_last"] = report.alt->last;
    j["epsilon_squared_alt"] = report.alt->eps2;
    j["alt_discrepancy"] = report.alt->discrepancy;
  }
  return j.dump(2);
}

std::string to_json(const RemainderDiagnostics& d) {
  nlohmann::json j;
  j["norm_f1"] = d.norm_f1;
  j["norm_g1"] = d.norm_g1;
  j["norm_g"] = d.norm_g;
  j["norm_pm"] = d.norm_pm;
  j["trace_sigma1"] = d.trace_sigma1;
  j["trace_pr"] = d.trace_pr;
  j["summands"] = d.summands;
  j["upper_bounds"] = d.upper_bounds;
  j["remainder"] = d.remainder;
  j["remainder_bound"] = d.remainder_bound;
  return j.dump(2);
}

}  // namespace tlbt
