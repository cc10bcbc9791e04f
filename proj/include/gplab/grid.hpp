#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gplab/common.hpp"

namespace gplab {

// Periodic uniform grid, d in {1,2,3}, box [-L/2, L/2)^d, n points per axis
// (power of two).  Wavenumbers are the standard set 2 pi m / L with
// m in [-n/2, n/2).
struct GridSpec {
  int dim = 1;
  double length = 1.0;
  std::size_t points = 2;

  GridSpec() = default;
  GridSpec(int d, double box_length, std::size_t n)
      : dim(d), length(box_length), points(n) {
    if (d < 1 || d > 3)
      throw std::invalid_argument("GridSpec: dim must be 1, 2 or 3");
    if (!(box_length > 0.0))
      throw std::invalid_argument("GridSpec: length must be positive");
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("GridSpec: points must be a power of two >= 2");
  }

  double spacing() const { return length / double(points); }

  std::size_t total() const {
    std::size_t t = 1;
    for (int a = 0; a < dim; ++a) t *= points;
    return t;
  }

  // measure weight h^d of one grid cell
  double cell_volume() const { return std::pow(spacing(), dim); }

  double coordinate(std::size_t i) const {
    return -0.5 * length + double(i) * spacing();
  }

  double wavenumber(std::size_t i) const {
    const std::ptrdiff_t m = i < points / 2 ? std::ptrdiff_t(i)
                                            : std::ptrdiff_t(i) - std::ptrdiff_t(points);
    return 2.0 * kPi * double(m) / length;
  }

  // minimum-image separation of two axis indices, in length units
  double min_image_distance(std::size_t i, std::size_t j) const {
    const std::size_t d = i >= j ? i - j : j - i;
    const std::size_t folded = d <= points / 2 ? d : points - d;
    return double(folded) * spacing();
  }

  std::array<std::size_t, 3> unflatten(std::size_t idx) const {
    std::array<std::size_t, 3> sub = {0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      sub[a] = idx % points;
      idx /= points;
    }
    return sub;
  }

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && length == o.length && points == o.points;
  }
};

inline std::vector<double> wavenumbers(const GridSpec& g) {
  std::vector<double> k(g.points);
  for (std::size_t i = 0; i < g.points; ++i) k[i] = g.wavenumber(i);
  return k;
}

}  // namespace gplab
