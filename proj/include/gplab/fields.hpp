#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gplab/common.hpp"
#include "gplab/fft.hpp"
#include "gplab/grid.hpp"

namespace gplab {

// Complex wave field on a periodic grid.
struct WaveField {
  GridSpec grid;
  std::vector<cplx> values;

  WaveField() = default;
  explicit WaveField(const GridSpec& g) : grid(g), values(g.total()) {}
  WaveField(const GridSpec& g, std::vector<cplx> v)
      : grid(g), values(std::move(v)) {
    if (values.size() != g.total())
      throw std::invalid_argument("WaveField: value count does not match grid");
  }
};

inline double l2_norm(const WaveField& f) {
  double s = 0.0;
  for (const cplx& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.grid.cell_volume());
}

inline void normalize(WaveField& f) {
  const double nrm = l2_norm(f);
  if (nrm == 0.0) throw std::invalid_argument("normalize: zero field");
  const double s = 1.0 / nrm;
  for (cplx& v : f.values) v *= s;
}

namespace detail {

// sum over modes of |u_hat|^2 * sum_axis m(k_axis), with Parseval weight
template <class ModeWeight>
double spectral_quadratic(const WaveField& f, ModeWeight&& weight) {
  const GridSpec& g = f.grid;
  std::vector<cplx> hat = f.values;
  const std::size_t n = g.points;
  std::size_t stride = 1;
  for (int a = 0; a < g.dim; ++a) {
    fft_axis(hat.data(), hat.size(), n, stride, false);
    stride *= n;
  }
  const auto ks = wavenumbers(g);
  double acc = 0.0;
  for (std::size_t idx = 0; idx < hat.size(); ++idx) {
    const auto sub = g.unflatten(idx);
    double w = 0.0;
    for (int a = 0; a < g.dim; ++a) w += weight(ks[sub[a]]);
    acc += w * std::norm(hat[idx]);
  }
  // forward transform carries an n^d factor: |u_hat|^2 sums need h^d / n^d
  return acc * g.cell_volume() / double(g.total());
}

}  // namespace detail

// ||grad u||_2^2 by spectral differentiation.
inline double grad_norm_sq(const WaveField& f) {
  return detail::spectral_quadratic(f, [](double k) { return k * k; });
}

inline double h1_norm_sq(const WaveField& f) {
  const double l2 = l2_norm(f);
  return l2 * l2 + grad_norm_sq(f);
}

// External potential sampled on the grid.
inline std::vector<double> sample_scalar(const GridSpec& g,
                                         const std::function<double(double, double, double)>& fn) {
  std::vector<double> out(g.total());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const auto sub = g.unflatten(idx);
    const double x = g.coordinate(sub[0]);
    const double y = g.dim > 1 ? g.coordinate(sub[1]) : 0.0;
    const double z = g.dim > 2 ? g.coordinate(sub[2]) : 0.0;
    out[idx] = fn(x, y, z);
  }
  return out;
}

// Radial profile sampled at the minimum-image distance from the origin;
// this is the convolution kernel for pair interactions on the torus.
template <class Pot>
std::vector<double> sample_radial(const GridSpec& g, const Pot& pot) {
  std::vector<double> out(g.total());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const auto sub = g.unflatten(idx);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double d = g.min_image_distance(sub[a], 0);
      r2 += d * d;
    }
    out[idx] = pot(std::sqrt(r2));
  }
  return out;
}

// Periodic convolution (V * rho)(x) = h^d sum_y V(x - y) rho(y) by FFT.
inline std::vector<double> convolve(const GridSpec& g,
                                    const std::vector<double>& kernel,
                                    const std::vector<double>& density) {
  const std::size_t n = g.points, total = g.total();
  std::vector<cplx> a(total), b(total);
  for (std::size_t i = 0; i < total; ++i) {
    a[i] = kernel[i];
    b[i] = density[i];
  }
  std::size_t stride = 1;
  for (int ax = 0; ax < g.dim; ++ax) {
    fft_axis(a.data(), total, n, stride, false);
    fft_axis(b.data(), total, n, stride, false);
    stride *= n;
  }
  for (std::size_t i = 0; i < total; ++i) a[i] *= b[i];
  stride = 1;
  for (int ax = 0; ax < g.dim; ++ax) {
    fft_axis(a.data(), total, n, stride, true);
    stride *= n;
  }
  std::vector<double> out(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = a[i].real() * g.cell_volume();
  return out;
}

// E[u] = int |grad u|^2 + (sigma/2) |u|^4 + V_ext |u|^2.
inline double gp_energy(const WaveField& f, double sigma,
                        const std::vector<double>* trap = nullptr) {
  const double hv = f.grid.cell_volume();
  double quartic = 0.0, external = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double d = std::norm(f.values[i]);
    quartic += d * d;
    if (trap) external += (*trap)[i] * d;
  }
  return grad_norm_sq(f) + 0.5 * sigma * quartic * hv + external * hv;
}

// E[u] = int |grad u|^2 + 1/2 int int V(x-y) |u(x)|^2 |u(y)|^2.
inline double hartree_energy(const WaveField& f,
                             const std::vector<double>& pair_kernel) {
  const double hv = f.grid.cell_volume();
  std::vector<double> density(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    density[i] = std::norm(f.values[i]);
  const auto mean_field = convolve(f.grid, pair_kernel, density);
  double interaction = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i)
    interaction += mean_field[i] * density[i];
  return grad_norm_sq(f) + 0.5 * interaction * hv;
}

// <x^2> with box coordinates.
inline double second_moment(const WaveField& f) {
  const GridSpec& g = f.grid;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    const auto sub = g.unflatten(idx);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double x = g.coordinate(sub[a]);
      r2 += x * x;
    }
    acc += r2 * std::norm(f.values[idx]);
  }
  return acc * g.cell_volume();
}

inline double peak_density(const WaveField& f) {
  double peak = 0.0;
  for (const cplx& v : f.values) peak = std::max(peak, std::norm(v));
  return peak;
}

// --- common initial fields ---

inline WaveField make_constant(const GridSpec& g) {
  WaveField f(g);
  const double c = 1.0 / std::sqrt(std::pow(g.length, g.dim));
  for (cplx& v : f.values) v = c;
  return f;
}

// Normalized plane wave with integer mode numbers per axis.
inline WaveField make_plane_wave(const GridSpec& g, int m0, int m1 = 0, int m2 = 0) {
  WaveField f(g);
  const int modes[3] = {m0, m1, m2};
  const double c = 1.0 / std::sqrt(std::pow(g.length, g.dim));
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    const auto sub = g.unflatten(idx);
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a)
      phase += 2.0 * kPi * double(modes[a]) * double(sub[a]) / double(g.points);
    f.values[idx] = std::polar(c, phase);
  }
  return f;
}

// Normalized isotropic Gaussian exp(-r^2 / (2 width^2)).
inline WaveField make_gaussian(const GridSpec& g, double width) {
  WaveField f(g);
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    const auto sub = g.unflatten(idx);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double x = g.coordinate(sub[a]);
      r2 += x * x;
    }
    f.values[idx] = std::exp(-r2 / (2.0 * width * width));
  }
  normalize(f);
  return f;
}

}  // namespace gplab
