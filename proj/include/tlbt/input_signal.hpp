#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tlbt/linalg.hpp"

namespace tlbt {

/// Input u(t) for t >= 0.
///
/// Kinds:
///   constant            u(t) = c (a fixed vector)
///   star                the seven-channel test signal
///                       [sin(4 pi t/100), cos(pi t/100), 3, e^{-2t},
///                        cos(t/100) e^{-t}, 1/(1+t^2), 1/(1+sqrt t)]
///   zero                u(t) = 0
///   table               samples (t_k, u_k), linear interpolation, constant
///                       extrapolation outside the table
///   piecewise constant  right-continuous steps on breakpoints t_0 < ... < t_K,
///                       holding the last value beyond t_K
class InputSignal {
 public:
  struct Constant {
    Vector value;
  };
  struct Star {};
  struct Zero {
    Index dimension;
  };
  struct Table {
    std::vector<double> times;
    Matrix values;  // m x K, column k belongs to times[k]
  };
  struct PiecewiseConstant {
    std::vector<double> breaks;  // K + 1 entries
    Matrix values;               // m x K
  };
  using Kind = std::variant<Constant, Star, Zero, Table, PiecewiseConstant>;

  static InputSignal constant(Vector value);
  static InputSignal constant(Index m, double c) { return constant(Vector::Constant(m, c)); }
  static InputSignal star();
  static InputSignal zero(Index m);
  static InputSignal table(std::vector<double> times, Matrix values);
  static InputSignal piecewise_constant(std::vector<double> breaks, Matrix values);

  /// Reads a CSV table "t, u_1, ..., u_m" (header row optional).
  static InputSignal table_from_csv(const std::string& path);

  /// Seeded piecewise-constant input on [0, horizon] with `pieces` equal steps,
  /// entries drawn uniformly from [-1, 1] and scaled so that the exact
  /// L2 norm over [0, horizon] is one. The value is held at zero after the horizon.
  static InputSignal random_unit(Index m, Index pieces, double horizon, std::uint64_t seed);

  Index dimension() const;
  const Kind& kind() const noexcept { return kind_; }

  Vector operator()(double t) const;

 private:
  explicit InputSignal(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Parameters needed to turn an input spec string into a signal.
struct InputContext {
  Index dimension = 1;
  double horizon = 1.0;
  std::uint64_t seed = 0;
};

/// Parses "const:<c>", "star", "zero", "table:<path>" or "random[:<pieces>]".
InputSignal parse_input(const std::string& spec, const InputContext& ctx);

}  // namespace tlbt
