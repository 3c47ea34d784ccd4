#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "tlbt/linalg.hpp"

namespace tlbt {

/// E x' = A x + B u, y = C x with x(0) = 0. E absent means identity.
/// Immutable after construction; the constructor validates dimensions,
/// finiteness and (when present) nonsingularity of E.
class StateSpaceSystem {
 public:
  StateSpaceSystem(Matrix a, Matrix b, Matrix c, std::optional<Matrix> e = std::nullopt,
                   std::string name = "system");

  const Matrix& a() const noexcept { return a_; }
  const Matrix& b() const noexcept { return b_; }
  const Matrix& c() const noexcept { return c_; }
  const std::optional<Matrix>& e() const noexcept { return e_; }
  const std::string& name() const noexcept { return name_; }

  Index n() const noexcept { return a_.rows(); }
  Index m() const noexcept { return b_.cols(); }
  Index p() const noexcept { return c_.rows(); }
  bool has_e() const noexcept { return e_.has_value(); }

  /// E, or the identity when absent.
  Matrix e_or_identity() const;

  /// (E^{-1} A, E^{-1} B, C); the system itself when E is absent.
  StateSpaceSystem standard_form() const;

 private:
  Matrix a_;
  Matrix b_;
  Matrix c_;
  std::optional<Matrix> e_;
  std::string name_;
};

/// 1D heat equation on the unit interval with Dirichlet ends:
/// A = (n+1)^2 tridiag(1, -2, 1), B = first m identity columns,
/// C = last p identity rows.
StateSpaceSystem generate_heat_model(Index n, Index m, Index p);

/// (S A S^{-1}, S B, C S^{-1}); requires E absent and S nonsingular.
StateSpaceSystem apply_state_transform(const StateSpaceSystem& sys, const Matrix& s);

/// Locations of the Matrix Market files making up a system.
struct SystemFiles {
  std::filesystem::path a;
  std::filesystem::path b;
  std::filesystem::path c;
  std::optional<std::filesystem::path> e;
};

/// Reads a JSON manifest {"A": path, "B": path, "C": path, "E": path?}.
/// Relative paths resolve against the manifest's directory.
SystemFiles read_manifest(const std::filesystem::path& manifest);

StateSpaceSystem load_system(const SystemFiles& files);
StateSpaceSystem load_system(const std::filesystem::path& manifest);

/// Writes A.mtx, B.mtx, C.mtx (E.mtx when present) and manifest.json into `dir`.
void save_system(const StateSpaceSystem& sys, const std::filesystem::path& dir);

}  // namespace tlbt
