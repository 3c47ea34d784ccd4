#pragma once

#include <string>

#include "tlbt/horizon.hpp"
#include "tlbt/linalg.hpp"
#include "tlbt/system.hpp"

namespace tlbt {

/// x_r' = A11 x_r + B1 u, y_r = C1 x_r.
struct ReducedModel {
  Matrix a11;  // r x r
  Matrix b1;   // r x m
  Matrix c1;   // p x r
  Horizon horizon = Horizon::infinite();
  std::string parent_name;

  Index order() const noexcept { return a11.rows(); }
  StateSpaceSystem as_system() const;
};

}  // namespace tlbt
