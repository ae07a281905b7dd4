// Dimensions of the horizontal/vertical coordinate splitting.
#pragma once

#include <stdexcept>

namespace nholo {

// n horizontal (x^1..x^n) and m vertical (y^1..y^m) coordinates. A point is a
// vector of length n + m with the x block first. Throughout the library,
// "axis" means a 0-based slot into that combined vector: x^i -> i - 1,
// y^a -> n + a - 1.
struct Dims {
  int n = 1;
  int m = 1;

  Dims() = default;
  Dims(int n_, int m_) : n(n_), m(m_) {
    if (n < 1 || m < 1)
      throw std::invalid_argument("Dims: both n and m must be >= 1");
  }

  int total() const { return n + m; }
  // Axis of y^(a+1) for 0-based vertical index a.
  int vaxis(int a) const { return n + a; }

  bool operator==(const Dims&) const = default;
};

}  // namespace nholo
