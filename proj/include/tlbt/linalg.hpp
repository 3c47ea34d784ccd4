#pragma once

#include <complex>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace tlbt {

// Dense storage is Eigen's default column-major layout throughout.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Throws ErrorCode::Numerical if any entry of `m` is NaN or infinite.
void require_finite(const Matrix& m, std::string_view name);
void require_square(const Matrix& m, std::string_view name);

/// Spectral norm (largest singular value).
double norm2(const Matrix& m);

/// e^{A t} by scaling and squaring with diagonal Pade approximants of
/// degree 3, 5, 7, 9 or 13, selected from the 1-norm of A t.
Matrix expm(const Matrix& a, double t);

struct SpectrumSeparation {
  double min_sum_abs = 0.0;  // min |lambda + mu| over lambda in A1, mu in A2
  bool is_separated = false;
  double tolerance = 0.0;
  std::complex<double> lambda;  // the minimizing pair
  std::complex<double> mu;
};

/// Default tolerance 1e-8 * (||A1||_2 + ||A2||_2) when `tol` is absent.
SpectrumSeparation spectrum_separation(const Matrix& a1, const Matrix& a2,
                                       std::optional<double> tol = {});

/// Solves A1 X + X A2^T = W by the real Schur (Bartels-Stewart) method.
Matrix solve_sylvester(const Matrix& a1, const Matrix& a2, const Matrix& w);

/// Solves A X + X A^T = W for symmetric W; the result is exactly symmetric.
Matrix solve_lyapunov(const Matrix& a, const Matrix& w);

/// Square factor Z with Z Z^T = X for A X + X A^T + B B^T = 0 and Hurwitz A
/// (Hammarling). Small eigen-components of X keep their relative accuracy.
Matrix lyapunov_factor(const Matrix& a, const Matrix& b);

/// Low-rank factor Z (n x k) with P ~= Z Z^T from the eigenpairs of P with
/// lambda > tol * ||P||_2, ordered by decreasing eigenvalue. Eigenvalues in
/// [-negative_tol * ||P||_2, 0] are treated as zero; anything more negative is
/// rejected. `negative_tol` defaults to `tol`.
Matrix spd_factor(const Matrix& p, double tol,
                  std::optional<double> negative_tol = {});

/// Eigenvalues of a general real square matrix.
Eigen::VectorXcd eigenvalues(const Matrix& a);

/// Max real part of the spectrum.
double spectral_abscissa(const Matrix& a);

}  // namespace tlbt
