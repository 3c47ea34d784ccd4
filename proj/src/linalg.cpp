#include "tlbt/linalg.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "tlbt/error.hpp"

namespace tlbt {

namespace {

std::string format_complex(std::complex<double> z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

// Pade coefficients b_0..b_m for e^x (Higham 2005).
constexpr std::array<double, 4> kPade3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                       25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                        30270240.0,    2162160.0,    110880.0,     3960.0,
                                        90.0,          1.0};
constexpr std::array<double, 14> kPade13{64764752532480000.0,
                                         32382376266240000.0,
                                         7771770303897600.0,
                                         1187353796428800.0,
                                         129060195264000.0,
                                         10559470521600.0,
                                         670442572800.0,
                                         33522128640.0,
                                         1323241920.0,
                                         40840800.0,
                                         960960.0,
                                         16380.0,
                                         182.0,
                                         1.0};

// 1-norm thresholds below which the degree-m approximant is accurate to
// unit roundoff without scaling.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Matrix pade_low_degree(const Matrix& a, const std::array<double, N>& b) {
  const Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;  // a2^k
  Matrix u_inner = Matrix::Zero(n, n);
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t k = 0; 2 * k < N; ++k) {
    v += b[2 * k] * power;
    if (2 * k + 1 < N) u_inner += b[2 * k + 1] * power;
    power = power * a2;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                         b[3] * a2 + b[1] * ident;
  const Matrix u = a * u_inner;
  const Matrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

// Eigenvalues read off the 1x1 and 2x2 diagonal blocks of a real Schur form.
std::vector<std::complex<double>> schur_eigenvalues(const Matrix& t) {
  std::vector<std::complex<double>> out;
  const Index n = t.rows();
  for (Index i = 0; i < n;) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      const double a = t(i, i), b = t(i, i + 1), c = t(i + 1, i), d = t(i + 1, i + 1);
      const double mean = 0.5 * (a + d);
      const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 * (a - d) * (a - d) + b * c));
      out.push_back(mean + disc);
      out.push_back(mean - disc);
      i += 2;
    } else {
      out.emplace_back(t(i, i), 0.0);
      i += 1;
    }
  }
  return out;
}

SpectrumSeparation separation_of(const std::vector<std::complex<double>>& l1,
                                 const std::vector<std::complex<double>>& l2, double tol) {
  SpectrumSeparation sep;
  sep.tolerance = tol;
  sep.min_sum_abs = std::numeric_limits<double>::infinity();
  for (const auto& lam : l1) {
    for (const auto& mu : l2) {
      const double s = std::abs(lam + mu);
      if (s < sep.min_sum_abs) {
        sep.min_sum_abs = s;
        sep.lambda = lam;
        sep.mu = mu;
      }
    }
  }
  sep.is_separated = sep.min_sum_abs >= tol;
  return sep;
}

// Block boundaries (start, size) of a quasi-triangular real Schur factor.
std::vector<std::pair<Index, Index>> schur_blocks(const Matrix& t) {
  std::vector<std::pair<Index, Index>> blocks;
  const Index n = t.rows();
  for (Index i = 0; i < n;) {
    const Index size = (i + 1 < n && t(i + 1, i) != 0.0) ? 2 : 1;
    blocks.emplace_back(i, size);
    i += size;
  }
  return blocks;
}

}  // namespace

void require_finite(const Matrix& m, std::string_view name) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::Numerical, "matrix " + std::string(name) + " has non-finite entries");
  }
}

void require_square(const Matrix& m, std::string_view name) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    std::ostringstream os;
    os << "matrix " << name << " must be square and nonempty, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::Dimension, os.str());
  }
}

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix expm(const Matrix& a, double t) {
  require_square(a, "A");
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "expm: time must be finite");
  require_finite(a, "A");

  const Matrix at = a * t;
  if (!at.allFinite()) throw Error(ErrorCode::Overflow, "expm: A*t overflows");
  const double norm1 = at.cwiseAbs().colwise().sum().maxCoeff();

  Matrix result;
  if (norm1 <= kTheta3) {
    result = pade_low_degree(at, kPade3);
  } else if (norm1 <= kTheta5) {
    result = pade_low_degree(at, kPade5);
  } else if (norm1 <= kTheta7) {
    result = pade_low_degree(at, kPade7);
  } else if (norm1 <= kTheta9) {
    result = pade_low_degree(at, kPade9);
  } else {
    const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
    const Matrix scaled = at * std::ldexp(1.0, -squarings);
    result = pade13(scaled);
    for (int k = 0; k < squarings; ++k) {
      result = result * result;
      if (!result.allFinite()) {
        throw Error(ErrorCode::Overflow, "expm: result overflows (||A t||_1 = " +
                                             std::to_string(norm1) + ")");
      }
    }
  }
  if (!result.allFinite()) throw Error(ErrorCode::Overflow, "expm: result is not finite");
  return result;
}

Eigen::VectorXcd eigenvalues(const Matrix& a) {
  require_square(a, "A");
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "eigenvalue iteration failed");
  return es.eigenvalues();
}

double spectral_abscissa(const Matrix& a) { return eigenvalues(a).real().maxCoeff(); }

SpectrumSeparation spectrum_separation(const Matrix& a1, const Matrix& a2,
                                       std::optional<double> tol) {
  require_square(a1, "A1");
  require_square(a2, "A2");
  const double tolerance = tol.value_or(1e-8 * (norm2(a1) + norm2(a2)));
  const Eigen::VectorXcd e1 = eigenvalues(a1);
  const Eigen::VectorXcd e2 = eigenvalues(a2);
  return separation_of({e1.data(), e1.data() + e1.size()}, {e2.data(), e2.data() + e2.size()},
                       tolerance);
}

Matrix solve_sylvester(const Matrix& a1, const Matrix& a2, const Matrix& w) {
  require_square(a1, "A1");
  require_square(a2, "A2");
  if (w.rows() != a1.rows() || w.cols() != a2.rows()) {
    std::ostringstream os;
    os << "solve_sylvester: W is " << w.rows() << "x" << w.cols() << ", expected " << a1.rows()
       << "x" << a2.rows();
    throw Error(ErrorCode::Dimension, os.str());
  }
  require_finite(a1, "A1");
  require_finite(a2, "A2");
  require_finite(w, "W");

  Eigen::RealSchur<Matrix> schur1(a1);
  Eigen::RealSchur<Matrix> schur2(a2);
  if (schur1.info() != Eigen::Success || schur2.info() != Eigen::Success) {
    throw Error(ErrorCode::Numerical, "solve_sylvester: Schur decomposition failed");
  }
  const Matrix& t = schur1.matrixT();
  const Matrix& s = schur2.matrixT();
  const Matrix& u = schur1.matrixU();
  const Matrix& v = schur2.matrixU();

  const double tol = 1e-8 * (norm2(a1) + norm2(a2));
  const SpectrumSeparation sep = separation_of(schur_eigenvalues(t), schur_eigenvalues(s), tol);
  if (!sep.is_separated) {
    std::ostringstream os;
    os << "Sylvester equation is singular: eigenvalue " << format_complex(sep.lambda)
       << " of A1 and " << format_complex(sep.mu) << " of A2 give |lambda + mu| = "
       << sep.min_sum_abs << " < " << tol;
    throw Error(ErrorCode::NotSeparated, os.str());
  }

  // With A1 = U T U^T and A2 = V S V^T, Y = U^T X V solves T Y + Y S^T = F.
  const Matrix f = u.transpose() * w * v;
  Matrix y = Matrix::Zero(f.rows(), f.cols());
  const auto row_blocks = schur_blocks(t);
  const auto col_blocks = schur_blocks(s);
  const Index n = t.rows();
  const Index r = s.rows();

  // Column blocks of Y couple only to later ones through S^T (lower quasi-triangular).
  for (auto jt = col_blocks.rbegin(); jt != col_blocks.rend(); ++jt) {
    const auto [j, bj] = *jt;
    const Index tail = r - j - bj;
    Matrix rhs = f.middleCols(j, bj);
    if (tail > 0) rhs.noalias() -= y.rightCols(tail) * s.block(j, j + bj, bj, tail).transpose();
    const Matrix m = s.block(j, j, bj, bj).transpose();

    for (auto it = row_blocks.rbegin(); it != row_blocks.rend(); ++it) {
      const auto [i, bi] = *it;
      const Index below = n - i - bi;
      Matrix z = rhs.middleRows(i, bi);
      if (below > 0) z.noalias() -= t.block(i, i + bi, bi, below) * y.block(i + bi, j, below, bj);
      // vec(T_ii Z + Z M) = (I (x) T_ii + M^T (x) I) vec Z
      const Index k = bi * bj;
      Matrix kron = Matrix::Zero(k, k);
      const Matrix tii = t.block(i, i, bi, bi);
      for (Index c = 0; c < bj; ++c) {
        kron.block(c * bi, c * bi, bi, bi) += tii;
        for (Index c2 = 0; c2 < bj; ++c2) {
          kron.block(c2 * bi, c * bi, bi, bi).diagonal().array() += m(c, c2);
        }
      }
      const Vector sol = kron.fullPivLu().solve(z.reshaped());
      y.block(i, j, bi, bj) = sol.reshaped(bi, bj);
    }
  }

  Matrix x = u * y * v.transpose();
  if (!x.allFinite()) throw Error(ErrorCode::Numerical, "solve_sylvester: solution is not finite");
  return x;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& w) {
  require_square(a, "A");
  if (w.rows() != a.rows() || w.cols() != a.cols()) {
    throw Error(ErrorCode::Dimension, "solve_lyapunov: W must match A");
  }
  const double scale = w.cwiseAbs().maxCoeff();
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidArgument, "solve_lyapunov: W is not symmetric");
  }
  const Matrix x = solve_sylvester(a, a, w);
  Matrix sym = 0.5 * (x + x.transpose());
  return sym;
}

Matrix lyapunov_factor(const Matrix& a, const Matrix& b) {
  using CMatrix = Eigen::MatrixXcd;
  using CVector = Eigen::VectorXcd;
  require_square(a, "A");
  const Index n = a.rows();
  if (b.rows() != n) throw Error(ErrorCode::Dimension, "lyapunov_factor: B must have " + std::to_string(n) + " rows");
  if (n == 0) return Matrix::Zero(0, 0);
  Eigen::ComplexSchur<CMatrix> schur(a.cast<std::complex<double>>());
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "lyapunov_factor: Schur decomposition failed");
  const CMatrix& t = schur.matrixT();
  const CMatrix& q = schur.matrixU();
  for (Index i = 0; i < n; ++i) {
    if (!(t(i, i).real() < 0.0)) {
      throw Error(ErrorCode::Unstable, "lyapunov_factor: eigenvalue " + format_complex(t(i, i)) + " is not stable");
    }
  }

  // T Y + Y T^H + Bt Bt^H = 0 with Y = U U^H, U upper triangular, last column first.
  CMatrix bt = q.adjoint() * b.cast<std::complex<double>>();
  CMatrix u = CMatrix::Zero(n, n);
  for (Index k = n - 1; k >= 0; --k) {
    const std::complex<double> tau = t(k, k);
    const Eigen::RowVectorXcd b2 = bt.row(k);
    const double nu = b2.norm() / std::sqrt(-2.0 * tau.real());
    u(k, k) = nu;
    if (k == 0 || nu == 0.0) {
      bt.conservativeResize(k, Eigen::NoChange);
      continue;
    }
    const CMatrix b1 = bt.topRows(k);
    const CVector rhs = -(t.col(k).head(k) * (nu * nu) + b1 * b2.adjoint()) / nu;
    CMatrix shifted = t.topLeftCorner(k, k);
    shifted.diagonal().array() += std::conj(tau);
    const CVector col = shifted.triangularView<Eigen::Upper>().solve(rhs);
    u.col(k).head(k) = col;
    bt = b1 - col * (b2 / nu);
  }

  // X is real, so [Re(QU), Im(QU)] is a real factor; compress it to n columns.
  const CMatrix z = q * u;
  Matrix zz(n, 2 * n);
  zz << z.real(), z.imag();
  Eigen::HouseholderQR<Matrix> qr(zz.transpose());
  return qr.matrixQR().topRows(n).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
}

Matrix spd_factor(const Matrix& p, double tol, std::optional<double> negative_tol) {
  require_square(p, "P");
  require_finite(p, "P");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "spd_factor: tol must be >= 0");
  const double neg_tol = negative_tol.value_or(tol);
  const double scale = p.cwiseAbs().maxCoeff();
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error(ErrorCode::InvalidArgument, "spd_factor: P is not symmetric");
  }
  const Index n = p.rows();
  if (scale == 0.0) return Matrix::Zero(n, 0);

  const Matrix sym = 0.5 * (p + p.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "spd_factor: eigensolver failed");
  const Vector& lambda = es.eigenvalues();  // ascending
  const double norm = lambda.cwiseAbs().maxCoeff();
  if (lambda(0) < -neg_tol * norm) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite: eigenvalue " << lambda(0) << " < -" << neg_tol
       << " * " << norm;
    throw Error(ErrorCode::NotPsd, os.str());
  }
  Index kept = 0;
  for (Index i = 0; i < n; ++i) {
    if (lambda(i) > tol * norm) ++kept;
  }
  Matrix z(n, kept);
  for (Index k = 0; k < kept; ++k) {
    const Index i = n - 1 - k;
    z.col(k) = es.eigenvectors().col(i) * std::sqrt(lambda(i));
  }
  return z;
}

}  // namespace tlbt
