#include "tlbt/input_signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "tlbt/error.hpp"

namespace tlbt {

namespace {

void require_increasing(const std::vector<double>& times, const char* what) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": non-finite time");
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + ": times must be strictly increasing");
    }
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

InputSignal InputSignal::constant(Vector value) {
  if (value.size() < 1) throw Error(ErrorCode::InvalidArgument, "constant input needs m >= 1");
  if (!value.allFinite()) throw Error(ErrorCode::InvalidArgument, "constant input must be finite");
  return InputSignal(Constant{std::move(value)});
}

InputSignal InputSignal::star() { return InputSignal(Star{}); }

InputSignal InputSignal::zero(Index m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "zero input needs m >= 1");
  return InputSignal(Zero{m});
}

InputSignal InputSignal::table(std::vector<double> times, Matrix values) {
  if (times.empty() || values.cols() != static_cast<Index>(times.size()) || values.rows() < 1) {
    throw Error(ErrorCode::Dimension, "input table needs one column of values per time stamp");
  }
  require_increasing(times, "input table");
  if (!values.allFinite()) throw Error(ErrorCode::InvalidArgument, "input table has non-finite values");
  return InputSignal(Table{std::move(times), std::move(values)});
}

InputSignal InputSignal::piecewise_constant(std::vector<double> breaks, Matrix values) {
  if (breaks.size() < 2 || values.cols() + 1 != static_cast<Index>(breaks.size()) || values.rows() < 1) {
    throw Error(ErrorCode::Dimension, "piecewise-constant input needs K+1 breakpoints for K values");
  }
  require_increasing(breaks, "piecewise-constant input");
  if (breaks.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "piecewise-constant input must start at t = 0");
  if (!values.allFinite()) throw Error(ErrorCode::InvalidArgument, "piecewise-constant input has non-finite values");
  return InputSignal(PiecewiseConstant{std::move(breaks), std::move(values)});
}

InputSignal InputSignal::table_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open input table '" + path + "'");
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    bool numeric = true;
    while (fields >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (times.empty() && rows.empty()) continue;  // header
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (row.size() < 2) throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": need t and at least one value");
    if (!rows.empty() && row.size() != rows.front().size() + 1) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    times.push_back(row.front());
    rows.emplace_back(row.begin() + 1, row.end());
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, path + ": no samples");
  Matrix values(static_cast<Index>(rows.front().size()), static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t i = 0; i < rows[k].size(); ++i) values(static_cast<Index>(i), static_cast<Index>(k)) = rows[k][i];
  }
  return table(std::move(times), std::move(values));
}

InputSignal InputSignal::random_unit(Index m, Index pieces, double horizon, std::uint64_t seed) {
  if (m < 1 || pieces < 1) throw Error(ErrorCode::InvalidArgument, "random input needs m, pieces >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidArgument, "random input needs a positive finite horizon");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix values(m, pieces + 1);
  for (Index k = 0; k < pieces; ++k) {
    for (Index i = 0; i < m; ++i) values(i, k) = dist(rng);
  }
  values.col(pieces).setZero();
  std::vector<double> breaks(static_cast<std::size_t>(pieces) + 2);
  const double width = horizon / static_cast<double>(pieces);
  for (Index k = 0; k < pieces; ++k) breaks[static_cast<std::size_t>(k)] = static_cast<double>(k) * width;
  breaks[static_cast<std::size_t>(pieces)] = horizon;
  breaks[static_cast<std::size_t>(pieces) + 1] = 2.0 * horizon;
  const double norm = std::sqrt(values.leftCols(pieces).squaredNorm() * width);
  if (norm > 0.0) values /= norm;
  return piecewise_constant(std::move(breaks), std::move(values));
}

Index InputSignal::dimension() const {
  return std::visit(Overloaded{[](const Constant& c) { return c.value.size(); },
                               [](const Star&) { return Index{7}; },
                               [](const Zero& z) { return z.dimension; },
                               [](const Table& t) { return t.values.rows(); },
                               [](const PiecewiseConstant& p) { return p.values.rows(); }},
                    kind_);
}

Vector InputSignal::operator()(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "input evaluated at negative or NaN time");
  return std::visit(
      Overloaded{
          [](const Constant& c) -> Vector { return c.value; },
          [t](const Star&) -> Vector {
            using std::numbers::pi;
            Vector u(7);
            u << std::sin(4.0 * t * pi / 100.0), std::cos(t * pi / 100.0), 3.0, std::exp(-2.0 * t),
                std::cos(t / 100.0) * std::exp(-t), 1.0 / (1.0 + t * t), 1.0 / (1.0 + std::sqrt(t));
            return u;
          },
          [](const Zero& z) -> Vector { return Vector::Zero(z.dimension); },
          [t](const Table& tab) -> Vector {
            const auto& ts = tab.times;
            if (t <= ts.front()) return tab.values.col(0);
            if (t >= ts.back()) return tab.values.col(tab.values.cols() - 1);
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const auto k = static_cast<Index>(it - ts.begin());
            const double t0 = ts[static_cast<std::size_t>(k - 1)];
            const double t1 = ts[static_cast<std::size_t>(k)];
            const double w = (t - t0) / (t1 - t0);
            return (1.0 - w) * tab.values.col(k - 1) + w * tab.values.col(k);
          },
          [t](const PiecewiseConstant& pc) -> Vector {
            const auto it = std::upper_bound(pc.breaks.begin(), pc.breaks.end(), t);
            Index k = static_cast<Index>(it - pc.breaks.begin()) - 1;
            k = std::clamp<Index>(k, 0, pc.values.cols() - 1);
            return pc.values.col(k);
          }},
      kind_);
}

InputSignal parse_input(const std::string& spec, const InputContext& ctx) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  if (head == "const") {
    char* end = nullptr;
    const double c = std::strtod(arg.c_str(), &end);
    if (arg.empty() || end != arg.c_str() + arg.size() || !std::isfinite(c)) {
      throw Error(ErrorCode::InvalidArgument, "input 'const:<c>' needs a finite number, got '" + arg + "'");
    }
    return InputSignal::constant(ctx.dimension, c);
  }
  if (head == "star" && arg.empty()) {
    if (ctx.dimension != 7) {
      throw Error(ErrorCode::Dimension,
                  "input 'star' has 7 channels but the system has m = " + std::to_string(ctx.dimension));
    }
    return InputSignal::star();
  }
  if (head == "zero" && arg.empty()) return InputSignal::zero(ctx.dimension);
  if (head == "table" && !arg.empty()) {
    InputSignal sig = InputSignal::table_from_csv(arg);
    if (sig.dimension() != ctx.dimension) {
      throw Error(ErrorCode::Dimension, "input table '" + arg + "' has " + std::to_string(sig.dimension()) +
                                            " channels, system has m = " + std::to_string(ctx.dimension));
    }
    return sig;
  }
  if (head == "random") {
    long pieces = 20;
    if (!arg.empty()) {
      char* end = nullptr;
      pieces = std::strtol(arg.c_str(), &end, 10);
      if (end != arg.c_str() + arg.size() || pieces < 1) {
        throw Error(ErrorCode::InvalidArgument, "input 'random:<pieces>' needs a positive count");
      }
    }
    return InputSignal::random_unit(ctx.dimension, pieces, ctx.horizon, ctx.seed);
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown input '" + spec + "' (expected const:<c>, star, zero, table:<path>, random[:<pieces>])");
}

}  // namespace tlbt
