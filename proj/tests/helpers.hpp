#pragma once

#include <cmath>

#include "gplab/fields.hpp"

namespace gplab_test {

// Smooth band-limited field (modes 0 and +-1 only): keeps the spectral
// weight of time-stencil and commutator errors small in conservation
// fixtures.
inline gplab::WaveField low_band(const gplab::GridSpec& g) {
  gplab::WaveField u(g);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double x = g.coordinate(i);
    u.values[i] = 1.0 + 0.6 * std::cos(2.0 * gplab::kPi * x / g.length) +
                  0.25 * std::sin(2.0 * gplab::kPi * x / g.length);
  }
  gplab::normalize(u);
  return u;
}

}  // namespace gplab_test
