#pragma once

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace lvq {

// Ties-to-even everywhere a real becomes an integer, so quantization has no
// directional bias and results don't depend on accumulated sign conventions.
inline double round_half_even(double x) { return std::nearbyint(x); }

// Symbol extraction with an explicit range check; doubles beyond int64 range
// cannot be represented as coder symbols.
inline int64_t checked_symbol(double x) {
  double r = round_half_even(x);
  if (!(r >= -9.007199254740992e15 && r <= 9.007199254740992e15)) {
    fail(ErrorCode::AlphabetOverflow,
         "coordinate magnitude exceeds representable symbol range");
  }
  return static_cast<int64_t>(r);
}

}  // namespace lvq
