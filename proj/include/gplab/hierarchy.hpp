#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gplab/common.hpp"
#include "gplab/density_matrix.hpp"
#include "gplab/dynamics.hpp"
#include "gplab/fields.hpp"
#include "gplab/manybody.hpp"

namespace gplab {

// Normalized even bump standing in for the delta function of the collision
// kernel; Gaussian profile truncated at 3 widths.
struct MollifiedDelta {
  double width = 0.1;
  std::vector<double> profile;  // indexed by raw separation (i - j) mod n
};

inline MollifiedDelta make_mollified_delta(const GridSpec& g, double width) {
  if (!(width > 0.0))
    throw std::invalid_argument("make_mollified_delta: width must be positive");
  MollifiedDelta d;
  d.width = width;
  d.profile.resize(g.points);
  for (std::size_t t = 0; t < g.points; ++t) {
    const double r = g.min_image_distance(t, 0);
    d.profile[t] = r <= 3.0 * width ? std::exp(-r * r / (2.0 * width * width)) : 0.0;
  }
  double total = 0.0;
  for (double v : d.profile) total += v * g.spacing();
  for (double& v : d.profile) v /= total;
  return d;
}

// U^(k)(t): conjugation by the free propagator, e^{-i t k^2} on row slots
// and the conjugate multiplier on column slots.
inline DensityMatrixK free_propagate_kernel(const DensityMatrixK& g, double t) {
  DensityMatrixK out = g;
  std::vector<cplx> mult(g.grid.points);
  for (std::size_t i = 0; i < mult.size(); ++i) {
    const double k = g.grid.wavenumber(i);
    mult[i] = std::polar(1.0, -t * k * k);
  }
  detail::apply_row_multiplier(out, mult);
  detail::apply_col_multiplier(out, mult);
  return out;
}

// Tr_{k+1} [ w(x_j - x_{k+1}), gamma^(k+1) ] for an even profile w tabulated
// over separations: kernel (x_k; x'_k) =
//   int dz w(x_j - z) gamma(x_k, z; x'_k, z) - int dz w(x'_j - z) (same).
// j is a zero-based particle slot below k.
inline DensityMatrixK collision_contract(const DensityMatrixK& g_kp1, int j,
                                         const std::vector<double>& profile) {
  const int k = g_kp1.k - 1;
  if (k < 1) throw std::invalid_argument("collision_contract: need k+1 >= 2");
  if (j < 0 || j >= k)
    throw std::invalid_argument("collision_contract: slot index out of range");
  const GridSpec& grid = g_kp1.grid;
  const std::size_t n = grid.points;
  DensityMatrixK out(k, grid);
  const std::size_t d = out.side(), dbig = g_kp1.side();
  const double h = grid.spacing();
  std::size_t jstride = 1;
  for (int a = 0; a < j; ++a) jstride *= n;

  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t rj = (r / jstride) % n;
    for (std::size_t c = 0; c < d; ++c) {
      const std::size_t cj = (c / jstride) % n;
      cplx acc = 0.0;
      for (std::size_t z = 0; z < n; ++z) {
        const cplx diag = g_kp1.kernel[(r + d * z) * dbig + (c + d * z)];
        acc += (profile[(rj - z + n) % n] - profile[(cj - z + n) % n]) * diag;
      }
      out.kernel[r * d + c] = acc * h;
    }
  }
  return out;
}

namespace detail {

// |phi><phi|^(x)k as a kernel.
inline DensityMatrixK factorized_kernel(const WaveField& phi, int k) {
  DensityMatrixK g(k, phi.grid);
  const std::size_t n = phi.grid.points, d = g.side();
  std::vector<cplx> tensor(d);
  for (std::size_t r = 0; r < d; ++r) {
    cplx v = 1.0;
    std::size_t rest = r;
    for (int a = 0; a < k; ++a) {
      v *= phi.values[rest % n];
      rest /= n;
    }
    tensor[r] = v;
  }
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      g.kernel[r * d + c] = tensor[r] * std::conj(tensor[c]);
  return g;
}

inline double kernel_fro_norm(const DensityMatrixK& g) {
  double s = 0.0;
  for (const cplx& v : g.kernel) s += std::norm(v);
  return std::sqrt(s) * g.measure();
}

}  // namespace detail

// Relative defect of the factorized GP densities in the mollified infinite
// hierarchy written in integral form:
//   gamma_t = U(t) gamma_0 - i sigma sum_j int_0^t U(t-s)
//             Tr_{k+1}[ delta_b(x_j - x_{k+1}), gamma_s^(k+1) ] ds
// with gamma_s^(k) = |phi_s><phi_s|^(x)k from the recorded trajectory and a
// composite-trapezoid time integral over the snapshots.
inline double infinite_hierarchy_residual(const Trajectory& traj, double sigma,
                                          int k, const MollifiedDelta& delta) {
  if (k < 1 || k > 2)
    throw std::invalid_argument("infinite_hierarchy_residual: k must be 1 or 2");
  if (traj.times.size() < 8)
    throw std::invalid_argument(
        "infinite_hierarchy_residual: need at least 8 recorded snapshots");
  const GridSpec& g = traj.grid;
  if (g.dim != 1)
    throw std::invalid_argument("infinite_hierarchy_residual: 1D trajectories only");
  const std::size_t n = g.points;
  const double t_final = traj.times.back();
  const std::size_t m = traj.times.size();

  const DensityMatrixK lhs = detail::factorized_kernel(traj.final_field(), k);
  DensityMatrixK rhs = free_propagate_kernel(
      detail::factorized_kernel(traj.field_at(0), k), t_final);

  const std::size_t d = lhs.side();
  std::vector<double> density(n);
  for (std::size_t s = 0; s < m; ++s) {
    const WaveField phi = traj.field_at(s);
    for (std::size_t i = 0; i < n; ++i) density[i] = std::norm(phi.values[i]);
    const auto smeared = convolve(g, delta.profile, density);

    // sum over j of the factorized collision kernels in one pass
    DensityMatrixK coll = detail::factorized_kernel(phi, k);
    for (std::size_t r = 0; r < d; ++r) {
      double row_sum = 0.0;
      std::size_t rest = r;
      for (int a = 0; a < k; ++a) {
        row_sum += smeared[rest % n];
        rest /= n;
      }
      for (std::size_t c = 0; c < d; ++c) {
        double col_sum = 0.0;
        std::size_t crest = c;
        for (int a = 0; a < k; ++a) {
          col_sum += smeared[crest % n];
          crest /= n;
        }
        coll.kernel[r * d + c] *= (row_sum - col_sum);
      }
    }
    DensityMatrixK prop = free_propagate_kernel(coll, t_final - traj.times[s]);
    const double dt_left = s > 0 ? traj.times[s] - traj.times[s - 1] : 0.0;
    const double dt_right = s + 1 < m ? traj.times[s + 1] - traj.times[s] : 0.0;
    const double weight = 0.5 * (dt_left + dt_right);
    const cplx factor = cplx(0.0, -sigma) * weight;
    for (std::size_t i = 0; i < rhs.kernel.size(); ++i)
      rhs.kernel[i] += factor * prop.kernel[i];
  }

  DensityMatrixK diff = lhs;
  for (std::size_t i = 0; i < diff.kernel.size(); ++i)
    diff.kernel[i] -= rhs.kernel[i];
  return detail::kernel_fro_norm(diff) / detail::kernel_fro_norm(lhs);
}

// Relative defect of the discrete BBGKY hierarchy on an exact trajectory:
//   i d/dt gamma^(k) = sum_j [-Lap_j, gamma^(k)]
//                    + sum_{i<j<=k} [U(x_i - x_j), gamma^(k)]
//                    + (N - k) sum_j Tr_{k+1} [U(x_j - x_{k+1}), gamma^(k+1)]
// with the time derivative by centered difference over three consecutive
// snapshots around the trajectory midpoint.
inline double finite_bbgky_residual(const ManyBodyTrajectory& traj,
                                    const std::vector<double>& pair_table,
                                    int k) {
  const int n_particles = traj.n_particles;
  if (k >= n_particles)
    throw std::invalid_argument("finite_bbgky_residual: k must be below N");
  if (traj.times.size() < 3)
    throw std::invalid_argument("finite_bbgky_residual: need three snapshots");
  const std::size_t mid = traj.times.size() / 2;
  const std::size_t lo = mid - 1, hi = mid + 1;
  const double dt = traj.times[hi] - traj.times[mid];
  if (std::abs((traj.times[mid] - traj.times[lo]) - dt) > 1e-12 * dt)
    throw std::invalid_argument("finite_bbgky_residual: snapshots must be equispaced");

  const GridSpec& g = traj.grid;
  const std::size_t n = g.points;
  const DensityMatrixK gk_lo = marginal(traj.state_at(lo), k);
  const DensityMatrixK gk_mid = marginal(traj.state_at(mid), k);
  const DensityMatrixK gk_hi = marginal(traj.state_at(hi), k);
  const DensityMatrixK gkp1 = marginal(traj.state_at(mid), k + 1);

  const std::size_t d = gk_mid.side();
  // LHS: i (gamma(t+dt) - gamma(t-dt)) / (2 dt)
  DensityMatrixK lhs = gk_mid;
  for (std::size_t i = 0; i < lhs.kernel.size(); ++i)
    lhs.kernel[i] = cplx(0.0, 1.0) * (gk_hi.kernel[i] - gk_lo.kernel[i]) / (2.0 * dt);

  // kinetic commutator
  DensityMatrixK kin_row = gk_mid, kin_col = gk_mid;
  std::vector<cplx> k2(n);
  for (std::size_t i = 0; i < n; ++i)
    k2[i] = g.wavenumber(i) * g.wavenumber(i);
  detail::apply_row_multiplier(kin_row, k2);
  detail::apply_col_multiplier(kin_col, k2);

  DensityMatrixK rhs = gk_mid;
  for (std::size_t i = 0; i < rhs.kernel.size(); ++i)
    rhs.kernel[i] = kin_row.kernel[i] - kin_col.kernel[i];

  // pair commutators inside the first k slots (diagonal multipliers)
  if (k >= 2) {
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        double vr = 0.0, vc = 0.0;
        std::size_t rr = r, cc = c;
        std::size_t digits_r[16], digits_c[16];
        for (int a = 0; a < k; ++a) {
          digits_r[a] = rr % n;
          digits_c[a] = cc % n;
          rr /= n;
          cc /= n;
        }
        for (int a = 0; a < k; ++a)
          for (int b = a + 1; b < k; ++b) {
            vr += pair_table[(digits_r[a] - digits_r[b] + n) % n];
            vc += pair_table[(digits_c[a] - digits_c[b] + n) % n];
          }
        rhs.kernel[r * d + c] += (vr - vc) * gk_mid.kernel[r * d + c];
      }
  }

  // contraction with the (k+1)-marginal
  for (int j = 0; j < k; ++j) {
    const DensityMatrixK coll = collision_contract(gkp1, j, pair_table);
    const double scale = double(n_particles - k);
    for (std::size_t i = 0; i < rhs.kernel.size(); ++i)
      rhs.kernel[i] += scale * coll.kernel[i];
  }

  DensityMatrixK diff = lhs;
  for (std::size_t i = 0; i < diff.kernel.size(); ++i)
    diff.kernel[i] -= rhs.kernel[i];
  const double base = detail::kernel_fro_norm(lhs);
  return detail::kernel_fro_norm(diff) / (base > 0.0 ? base : 1.0);
}

}  // namespace gplab
