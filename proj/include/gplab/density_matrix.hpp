#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gplab/common.hpp"
#include "gplab/fft.hpp"
#include "gplab/fields.hpp"
#include "gplab/grid.hpp"

namespace gplab {

// k-particle marginal kernel on a 1D periodic grid.  The kernel holds
// continuum samples gamma(x_k; x'_k); traces and operator eigenvalues fold
// in the grid measure h^k so that Tr gamma = 1.
struct DensityMatrixK {
  int k = 1;
  GridSpec grid;
  std::vector<cplx> kernel;  // row-major, side n^k

  DensityMatrixK() = default;
  DensityMatrixK(int k_particles, const GridSpec& g)
      : k(k_particles), grid(g) {
    if (g.dim != 1)
      throw std::invalid_argument("DensityMatrixK: one-dimensional grids only");
    std::size_t s = 1;
    for (int j = 0; j < k; ++j) s *= g.points;
    const std::size_t bytes = s * s * sizeof(cplx);
    if (bytes > kMemoryBudgetBytes)
      throw SizeError("DensityMatrixK: kernel of side n^k = " + std::to_string(s) +
                      " needs " + std::to_string(bytes >> 20) +
                      " MiB, over the 2 GiB budget (reduce k or n)");
    kernel.assign(s * s, cplx(0.0));
  }

  std::size_t side() const {
    std::size_t s = 1;
    for (int j = 0; j < k; ++j) s *= grid.points;
    return s;
  }

  // h^k measure folded into traces and eigenvalues
  double measure() const { return std::pow(grid.spacing(), k); }
};

inline cplx dm_trace(const DensityMatrixK& g) {
  const std::size_t d = g.side();
  cplx acc = 0.0;
  for (std::size_t r = 0; r < d; ++r) acc += g.kernel[r * d + r];
  return acc * g.measure();
}

inline double hermiticity_defect(const DensityMatrixK& g) {
  const std::size_t d = g.side();
  double worst = 0.0;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = r; c < d; ++c)
      worst = std::max(worst,
                       std::abs(g.kernel[r * d + c] - std::conj(g.kernel[c * d + r])));
  return worst;
}

// Eigenvalues of the operator (kernel times measure), ascending.
inline std::vector<double> dm_eigenvalues(const DensityMatrixK& g) {
  const std::size_t d = g.side();
  Eigen::MatrixXcd a(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) a(r, c) = g.kernel[r * d + c] * g.measure();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = solver.eigenvalues()[i];
  return out;
}

inline double min_eigenvalue(const DensityMatrixK& g) {
  return dm_eigenvalues(g).front();
}

// 1/2 sum of singular values of the difference (both arguments trace-one).
inline double trace_distance(const DensityMatrixK& a, const DensityMatrixK& b) {
  if (!(a.grid == b.grid) || a.k != b.k)
    throw std::invalid_argument("trace_distance: mismatched grids or particle counts");
  DensityMatrixK diff = a;
  for (std::size_t i = 0; i < diff.kernel.size(); ++i)
    diff.kernel[i] -= b.kernel[i];
  const auto eigs = dm_eigenvalues(diff);
  double sum = 0.0;
  for (double v : eigs) sum += std::abs(v);
  return 0.5 * sum;
}

// <phi^(x)k, gamma phi^(x)k>: condensate fraction against a reference orbital.
inline double condensate_overlap(const DensityMatrixK& g, const WaveField& phi) {
  if (!(phi.grid == g.grid))
    throw std::invalid_argument("condensate_overlap: mismatched grids");
  const std::size_t n = g.grid.points, d = g.side();
  std::vector<cplx> tensor(d);
  for (std::size_t r = 0; r < d; ++r) {
    cplx v = 1.0;
    std::size_t idx = r;
    for (int j = 0; j < g.k; ++j) {
      v *= phi.values[idx % n];
      idx /= n;
    }
    tensor[r] = v;
  }
  cplx acc = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    cplx row = 0.0;
    for (std::size_t c = 0; c < d; ++c) row += g.kernel[r * d + c] * tensor[c];
    acc += std::conj(tensor[r]) * row;
  }
  return (acc * g.measure() * g.measure()).real();
}

namespace detail {

// Mode multiplier applied to all row slots (operator acting from the left).
inline void apply_row_multiplier(DensityMatrixK& g, const std::vector<cplx>& m) {
  const std::size_t d = g.side(), n = g.grid.points;
  std::size_t stride = d;  // row sub-axis 0
  for (int j = 0; j < g.k; ++j) {
    fft_axis(g.kernel.data(), d * d, n, stride, false, m.data());
    fft_axis(g.kernel.data(), d * d, n, stride, true);
    stride *= n;
  }
}

// Operator acting from the right: inverse transform, conjugate multiplier,
// forward transform on each column slot.
inline void apply_col_multiplier(DensityMatrixK& g, const std::vector<cplx>& m) {
  const std::size_t d = g.side(), n = g.grid.points;
  std::vector<cplx> conj_m(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) conj_m[i] = std::conj(m[i]);
  std::size_t stride = 1;
  for (int j = 0; j < g.k; ++j) {
    fft_axis(g.kernel.data(), d * d, n, stride, true);
    multiply_axis(g.kernel.data(), d * d, n, stride, conj_m.data());
    fft_axis(g.kernel.data(), d * d, n, stride, false);
    stride *= n;
  }
}

}  // namespace detail

// Tr (1 - Lap_1) ... (1 - Lap_k) gamma: the short-scale Sobolev diagnostic.
inline double sobolev_trace(const DensityMatrixK& g) {
  DensityMatrixK work = g;
  std::vector<cplx> mult(g.grid.points);
  for (std::size_t i = 0; i < mult.size(); ++i) {
    const double kk = g.grid.wavenumber(i);
    mult[i] = 1.0 + kk * kk;
  }
  detail::apply_row_multiplier(work, mult);
  return dm_trace(work).real();
}

// Partial trace over the last particle slot; consistency of the marginal
// chain.
inline DensityMatrixK partial_trace_last(const DensityMatrixK& g) {
  if (g.k < 2)
    throw std::invalid_argument("partial_trace_last: need k >= 2");
  DensityMatrixK out(g.k - 1, g.grid);
  const std::size_t n = g.grid.points;
  const std::size_t dsmall = out.side(), d = g.side();
  const double h = g.grid.spacing();
  for (std::size_t r = 0; r < dsmall; ++r)
    for (std::size_t c = 0; c < dsmall; ++c) {
      cplx acc = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        acc += g.kernel[(r + dsmall * a) * d + (c + dsmall * a)];
      out.kernel[r * dsmall + c] = acc * h;
    }
  return out;
}

}  // namespace gplab
