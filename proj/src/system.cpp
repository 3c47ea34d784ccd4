#include "tlbt/system.hpp"

#include <sstream>

#include <json.hpp>

#include "tlbt/error.hpp"
#include "tlbt/io.hpp"
#include "tlbt/matrix_market.hpp"

namespace tlbt {

namespace {

constexpr double kSingularRcond = 1e-12;

std::string dims(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

StateSpaceSystem::StateSpaceSystem(Matrix a, Matrix b, Matrix c, std::optional<Matrix> e,
                                   std::string name)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), e_(std::move(e)), name_(std::move(name)) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) {
    throw Error(ErrorCode::Dimension, "A must be square and nonempty, got " + dims(a_));
  }
  const Index n = a_.rows();
  if (b_.rows() != n || b_.cols() < 1) {
    throw Error(ErrorCode::Dimension,
                "B must have " + std::to_string(n) + " rows and at least one column, got " + dims(b_));
  }
  if (c_.cols() != n || c_.rows() < 1) {
    throw Error(ErrorCode::Dimension,
                "C must have " + std::to_string(n) + " columns and at least one row, got " + dims(c_));
  }
  require_finite(a_, "A");
  require_finite(b_, "B");
  require_finite(c_, "C");
  if (e_) {
    if (e_->rows() != n || e_->cols() != n) {
      throw Error(ErrorCode::Dimension, "E must be " + std::to_string(n) + "x" + std::to_string(n) +
                                            ", got " + dims(*e_));
    }
    require_finite(*e_, "E");
    Eigen::PartialPivLU<Matrix> lu(*e_);
    if (!(lu.rcond() > kSingularRcond)) {
      throw Error(ErrorCode::Singular, "E is singular (reciprocal condition estimate " +
                                           std::to_string(lu.rcond()) + ")");
    }
  }
}

Matrix StateSpaceSystem::e_or_identity() const {
  return e_ ? *e_ : Matrix::Identity(n(), n());
}

StateSpaceSystem StateSpaceSystem::standard_form() const {
  if (!e_) return *this;
  Eigen::PartialPivLU<Matrix> lu(*e_);
  return StateSpaceSystem(lu.solve(a_), lu.solve(b_), c_, std::nullopt, name_);
}

StateSpaceSystem generate_heat_model(Index n, Index m, Index p) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "heat model needs n >= 3");
  if (m < 1 || m > n || p < 1 || p > n) {
    throw Error(ErrorCode::InvalidArgument, "heat model needs 1 <= m, p <= n");
  }
  const double h2 = static_cast<double>((n + 1) * (n + 1));
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = -2.0 * h2;
    if (i + 1 < n) {
      a(i, i + 1) = h2;
      a(i + 1, i) = h2;
    }
  }
  Matrix b = Matrix::Identity(n, n).leftCols(m);
  Matrix c = Matrix::Identity(n, n).bottomRows(p);
  std::ostringstream name;
  name << "heat_n" << n << "_m" << m << "_p" << p;
  return StateSpaceSystem(std::move(a), std::move(b), std::move(c), std::nullopt, name.str());
}

StateSpaceSystem apply_state_transform(const StateSpaceSystem& sys, const Matrix& s) {
  if (sys.has_e()) {
    throw Error(ErrorCode::InvalidArgument, "state transforms require a system without E");
  }
  if (s.rows() != sys.n() || s.cols() != sys.n()) {
    throw Error(ErrorCode::Dimension, "transform must be " + std::to_string(sys.n()) + "x" +
                                          std::to_string(sys.n()) + ", got " + dims(s));
  }
  Eigen::PartialPivLU<Matrix> lu(s);
  if (!(lu.rcond() > kSingularRcond)) throw Error(ErrorCode::Singular, "state transform is singular");
  // X S^{-1} = (S^{-T} X^T)^T
  Eigen::PartialPivLU<Matrix> lu_t(s.transpose());
  const Matrix a_sinv = lu_t.solve((s * sys.a()).transpose()).transpose();
  const Matrix c_sinv = lu_t.solve(sys.c().transpose()).transpose();
  return StateSpaceSystem(a_sinv, s * sys.b(), c_sinv, std::nullopt, sys.name());
}

SystemFiles read_manifest(const std::filesystem::path& manifest) {
  if (!std::filesystem::exists(manifest)) {
    throw Error(ErrorCode::Io, "manifest '" + manifest.string() + "' does not exist");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::Parse, "manifest '" + manifest.string() + "': " + ex.what());
  }
  const auto base = manifest.parent_path();
  auto role = [&](const char* key, bool required) -> std::optional<std::filesystem::path> {
    if (!doc.is_object() || !doc.contains(key)) {
      if (required) {
        throw Error(ErrorCode::Parse,
                    "manifest '" + manifest.string() + "' has no entry \"" + key + "\"");
      }
      return std::nullopt;
    }
    if (!doc[key].is_string()) {
      throw Error(ErrorCode::Parse, std::string("manifest entry \"") + key + "\" must be a path string");
    }
    std::filesystem::path p = doc[key].get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  SystemFiles files{*role("A", true), *role("B", true), *role("C", true), role("E", false)};
  return files;
}

StateSpaceSystem load_system(const SystemFiles& files) {
  Matrix a = read_matrix_market(files.a);
  Matrix b = read_matrix_market(files.b);
  Matrix c = read_matrix_market(files.c);
  std::optional<Matrix> e;
  if (files.e) e = read_matrix_market(*files.e);
  return StateSpaceSystem(std::move(a), std::move(b), std::move(c), std::move(e),
                          files.a.parent_path().filename().string());
}

StateSpaceSystem load_system(const std::filesystem::path& manifest) {
  return load_system(read_manifest(manifest));
}

void save_system(const StateSpaceSystem& sys, const std::filesystem::path& dir) {
  write_matrix_market(dir / "A.mtx", sys.a());
  write_matrix_market(dir / "B.mtx", sys.b());
  write_matrix_market(dir / "C.mtx", sys.c());
  nlohmann::json manifest = {{"A", "A.mtx"}, {"B", "B.mtx"}, {"C", "C.mtx"}};
  if (sys.e()) {
    write_matrix_market(dir / "E.mtx", *sys.e());
    manifest["E"] = "E.mtx";
  }
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace tlbt
