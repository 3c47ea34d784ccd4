#pragma once

#include <limits>

namespace tlbt {

/// Integration horizon: a finite T > 0 or infinity.
class Horizon {
 public:
  static Horizon infinite() { return Horizon(std::numeric_limits<double>::infinity()); }
  static Horizon finite(double t);

  bool is_infinite() const noexcept { return value_ == std::numeric_limits<double>::infinity(); }
  double value() const noexcept { return value_; }

  friend bool operator==(const Horizon&, const Horizon&) = default;

 private:
  explicit Horizon(double v) : value_(v) {}
  double value_;
};

}  // namespace tlbt
