#include "tlbt/gramians.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tlbt/error.hpp"

namespace tlbt {

namespace {

// Gramians are PSD integrals; floating point may leave eigenvalues slightly below zero.
constexpr double kPsdTolerance = 1e-10;

void check_psd(const Matrix& x, const char* name) {
  if (x.cwiseAbs().maxCoeff() == 0.0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> es(x, Eigen::EigenvaluesOnly);
  const Vector& lambda = es.eigenvalues();
  const double norm = lambda.cwiseAbs().maxCoeff();
  if (lambda(0) < -kPsdTolerance * norm) {
    std::ostringstream os;
    os << "Gramian " << name << " is numerically indefinite: eigenvalue " << lambda(0)
       << " against ||" << name << "||_2 = " << norm;
    throw Error(ErrorCode::NotPsd, os.str());
  }
}

void require_hurwitz(const Matrix& a) {
  const Eigen::VectorXcd ev = eigenvalues(a);
  std::ostringstream bad;
  int count = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i).real() >= 0.0) {
      if (count++ < 8) bad << " " << ev(i).real() << (ev(i).imag() < 0 ? "" : "+") << ev(i).imag() << "i";
    }
  }
  if (count > 0) {
    throw Error(ErrorCode::Unstable, "infinite Gramians need a Hurwitz state matrix; " +
                                         std::to_string(count) + " eigenvalue(s) with Re >= 0:" + bad.str());
  }
}

Matrix symmetric_part(const Matrix& x) { return 0.5 * (x + x.transpose()); }

}  // namespace

Horizon Horizon::finite(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be a positive finite number");
  }
  return Horizon(t);
}

StateSpaceSystem ReducedModel::as_system() const {
  return StateSpaceSystem(a11, b1, c1, std::nullopt, parent_name + "_r" + std::to_string(order()));
}

HorizonData horizon_data(const StateSpaceSystem& sys, double horizon) {
  Horizon::finite(horizon);
  const StateSpaceSystem std_sys = sys.standard_form();
  const Matrix phi = expm(std_sys.a(), horizon);
  HorizonData hd;
  hd.horizon = horizon;
  hd.f_state = phi * std_sys.b();
  hd.f = sys.has_e() ? Matrix(*sys.e() * hd.f_state) : hd.f_state;
  hd.g = sys.c() * phi;
  return hd;
}

GramianSet infinite_gramians(const StateSpaceSystem& sys) {
  const StateSpaceSystem s = sys.standard_form();
  require_hurwitz(s.a());
  GramianSet g;
  g.horizon = Horizon::infinite();
  g.p = solve_lyapunov(s.a(), -s.b() * s.b().transpose());
  g.q_balancing = solve_lyapunov(s.a().transpose(), -s.c().transpose() * s.c());
  check_psd(g.p, "P");
  check_psd(g.q_balancing, "Q");
  g.p_factor = lyapunov_factor(s.a(), s.b());
  Matrix zq = lyapunov_factor(s.a().transpose(), s.c().transpose());
  if (sys.has_e()) {
    Eigen::PartialPivLU<Matrix> lu(sys.e()->transpose());
    // Q = E^{-T} (E^T Q E) E^{-1}
    const Matrix left = lu.solve(g.q_balancing);
    g.q = symmetric_part(lu.solve(left.transpose()).transpose());
    zq = lu.solve(zq);
  } else {
    g.q = g.q_balancing;
  }
  g.q_factor = std::move(zq);
  return g;
}

GramianSet time_limited_gramians(const StateSpaceSystem& sys, double horizon) {
  const Horizon h = Horizon::finite(horizon);
  const StateSpaceSystem s = sys.standard_form();
  HorizonData hd = horizon_data(sys, horizon);
  GramianSet g;
  g.horizon = h;
  const Matrix rhs_p = symmetric_part(-s.b() * s.b().transpose() + hd.f_state * hd.f_state.transpose());
  const Matrix rhs_q = symmetric_part(-s.c().transpose() * s.c() + hd.g.transpose() * hd.g);
  g.p = solve_lyapunov(s.a(), rhs_p);
  g.q_balancing = solve_lyapunov(s.a().transpose(), rhs_q);
  check_psd(g.p, "P_T");
  check_psd(g.q_balancing, "Q_T");
  if (sys.has_e()) {
    Eigen::PartialPivLU<Matrix> lu(sys.e()->transpose());
    const Matrix left = lu.solve(g.q_balancing);
    g.q = symmetric_part(lu.solve(left.transpose()).transpose());
  } else {
    g.q = g.q_balancing;
  }
  g.horizon_data = std::move(hd);
  return g;
}

GramianSet compute_gramians(const StateSpaceSystem& sys, Horizon horizon) {
  return horizon.is_infinite() ? infinite_gramians(sys) : time_limited_gramians(sys, horizon.value());
}

void attach_factors(GramianSet& g, double tol) {
  g.p_factor = spd_factor(g.p, tol, kPsdTolerance);
  g.q_factor = spd_factor(g.q, tol, kPsdTolerance);
}

Matrix quadrature_integral(const Matrix& a1, const Matrix& b1, const Matrix& a2, const Matrix& b2,
                           double horizon, Index panels) {
  require_square(a1, "A1");
  require_square(a2, "A2");
  if (b1.rows() != a1.rows() || b2.rows() != a2.rows() || b1.cols() != b2.cols()) {
    throw Error(ErrorCode::Dimension, "quadrature_integral: inconsistent B1/B2 dimensions");
  }
  if (panels < 1) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least one panel");
  Horizon::finite(horizon);

  static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
  const double width = horizon / static_cast<double>(panels);
  const Matrix core = b1 * b2.transpose();
  Matrix sum = Matrix::Zero(a1.rows(), a2.rows());
  for (Index k = 0; k < panels; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) * width;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double s = mid + 0.5 * width * nodes[q];
      sum.noalias() += weights[q] * (expm(a1, s) * core * expm(a2, s).transpose());
    }
  }
  return 0.5 * width * sum;
}

Matrix gramian_quadrature_oracle(const StateSpaceSystem& sys, double horizon, Index panels) {
  const StateSpaceSystem s = sys.standard_form();
  return quadrature_integral(s.a(), s.b(), s.a(), s.b(), horizon, panels);
}

Matrix reduced_gramian(const ReducedModel& rom, Horizon horizon) {
  Matrix rhs = -rom.b1 * rom.b1.transpose();
  if (!horizon.is_infinite()) {
    const Matrix fr = expm(rom.a11, horizon.value()) * rom.b1;
    rhs += fr * fr.transpose();
  }
  try {
    return solve_lyapunov(rom.a11, symmetric_part(rhs));
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::NotSeparated) throw;
    throw Error(ErrorCode::NotSeparated,
                std::string("bound hypothesis Lambda(A11) and -Lambda(A11) disjoint is violated: ") + ex.what());
  }
}

Matrix mixed_gramian(const StateSpaceSystem& sys, const ReducedModel& rom, Horizon horizon) {
  const StateSpaceSystem s = sys.standard_form();
  if (rom.b1.cols() != s.m() || rom.c1.rows() != s.p()) {
    throw Error(ErrorCode::Dimension, "reduced model does not match the system's inputs/outputs");
  }
  Matrix rhs = -s.b() * rom.b1.transpose();
  if (!horizon.is_infinite()) {
    const Matrix ft = expm(s.a(), horizon.value()) * s.b();
    const Matrix fr = expm(rom.a11, horizon.value()) * rom.b1;
    rhs += ft * fr.transpose();
  }
  try {
    return solve_sylvester(s.a(), rom.a11, rhs);
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::NotSeparated) throw;
    throw Error(ErrorCode::NotSeparated,
                std::string("bound hypothesis Lambda(A) and -Lambda(A11) disjoint is violated: ") + ex.what());
  }
}

}  // namespace tlbt
