#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gplab/common.hpp"
#include "gplab/fields.hpp"

namespace gplab {

struct EvolveParams {
  double dt = 1e-3;
  double t_final = 1.0;
  int record_every = 1;

  std::int64_t steps() const {
    if (!(dt > 0.0)) throw std::invalid_argument("EvolveParams: dt must be positive");
    if (dt > t_final + 1e-15)
      throw std::invalid_argument("EvolveParams: dt must not exceed t_final");
    if (record_every < 1)
      throw std::invalid_argument("EvolveParams: record_every must be >= 1");
    const double raw = t_final / dt;
    if (raw > double(INT32_MAX))
      throw std::invalid_argument("EvolveParams: step count exceeds 2^31");
    return std::llround(raw);
  }
};

struct Trajectory {
  GridSpec grid;
  std::vector<double> times;
  std::vector<std::vector<cplx>> snapshots;

  WaveField field_at(std::size_t i) const {
    return WaveField(grid, snapshots[i]);
  }
  WaveField final_field() const { return field_at(snapshots.size() - 1); }
};

namespace detail {

inline void check_finite(const std::vector<cplx>& v, std::int64_t step_index) {
  for (const cplx& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw SolverError("evolution produced NaN/Inf at step " +
                        std::to_string(step_index));
}

// e^{-i dt k^2} multipliers per axis (real_time) or e^{-dt k^2} (imaginary).
inline std::vector<cplx> kinetic_phase(const GridSpec& g, double dt, bool imaginary) {
  std::vector<cplx> ph(g.points);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double k2 = g.wavenumber(i) * g.wavenumber(i);
    ph[i] = imaginary ? cplx(std::exp(-dt * k2), 0.0) : std::polar(1.0, -dt * k2);
  }
  return ph;
}

inline void kinetic_step(std::vector<cplx>& v, const GridSpec& g,
                         const std::vector<cplx>& phase) {
  std::size_t stride = 1;
  for (int a = 0; a < g.dim; ++a) {
    fft_axis(v.data(), v.size(), g.points, stride, false, phase.data());
    stride *= g.points;
  }
  stride = 1;
  for (int a = 0; a < g.dim; ++a) {
    fft_axis(v.data(), v.size(), g.points, stride, true);
    stride *= g.points;
  }
}

}  // namespace detail

// Strang-split GP evolution: half potential phase, full kinetic Fourier
// step, half potential phase.  The nonlinear phase uses the instantaneous
// density, which the phase step itself leaves invariant.
inline Trajectory evolve_gp(const WaveField& initial, double sigma,
                            const std::vector<double>* trap,
                            const EvolveParams& params) {
  const GridSpec g = initial.grid;
  const std::int64_t steps = params.steps();
  std::vector<cplx> u = initial.values;
  const auto phase = detail::kinetic_phase(g, params.dt, false);

  Trajectory traj;
  traj.grid = g;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(u);

  const double half = 0.5 * params.dt;
  for (std::int64_t s = 1; s <= steps; ++s) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double pot = sigma * std::norm(u[i]) + (trap ? (*trap)[i] : 0.0);
      u[i] *= std::polar(1.0, -half * pot);
    }
    detail::kinetic_step(u, g, phase);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double pot = sigma * std::norm(u[i]) + (trap ? (*trap)[i] : 0.0);
      u[i] *= std::polar(1.0, -half * pot);
    }
    detail::check_finite(u, s);
    if (s % params.record_every == 0 || s == steps) {
      traj.times.push_back(double(s) * params.dt);
      traj.snapshots.push_back(u);
    }
  }
  return traj;
}

// Hartree evolution: the nonlinear potential (V * |u|^2) is recomputed by
// FFT convolution at each half step.
inline Trajectory evolve_hartree(const WaveField& initial,
                                 const std::vector<double>& pair_kernel,
                                 const EvolveParams& params) {
  const GridSpec g = initial.grid;
  const std::int64_t steps = params.steps();
  std::vector<cplx> u = initial.values;
  const auto phase = detail::kinetic_phase(g, params.dt, false);

  Trajectory traj;
  traj.grid = g;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(u);

  std::vector<double> density(u.size());
  const double half = 0.5 * params.dt;
  const auto half_step = [&] {
    for (std::size_t i = 0; i < u.size(); ++i) density[i] = std::norm(u[i]);
    const auto mean_field = convolve(g, pair_kernel, density);
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] *= std::polar(1.0, -half * mean_field[i]);
  };

  for (std::int64_t s = 1; s <= steps; ++s) {
    half_step();
    detail::kinetic_step(u, g, phase);
    half_step();
    detail::check_finite(u, s);
    if (s % params.record_every == 0 || s == steps) {
      traj.times.push_back(double(s) * params.dt);
      traj.snapshots.push_back(u);
    }
  }
  return traj;
}

struct GroundStateResult {
  WaveField field;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// (-Laplace + V_ext + sigma |phi|^2) phi, spectral kinetic part.
inline std::vector<cplx> apply_gp_hamiltonian(const WaveField& f, double sigma,
                                              const std::vector<double>* trap) {
  const GridSpec& g = f.grid;
  std::vector<cplx> kin = f.values;
  std::vector<double> k2(g.points);
  for (std::size_t i = 0; i < g.points; ++i)
    k2[i] = g.wavenumber(i) * g.wavenumber(i);
  std::vector<cplx> hat = f.values;
  std::size_t stride = 1;
  for (int a = 0; a < g.dim; ++a) {
    fft_axis(hat.data(), hat.size(), g.points, stride, false);
    stride *= g.points;
  }
  for (std::size_t idx = 0; idx < hat.size(); ++idx) {
    const auto sub = g.unflatten(idx);
    double w = 0.0;
    for (int a = 0; a < g.dim; ++a) w += k2[sub[a]];
    hat[idx] *= w;
  }
  stride = 1;
  for (int a = 0; a < g.dim; ++a) {
    fft_axis(hat.data(), hat.size(), g.points, stride, true);
    stride *= g.points;
  }
  for (std::size_t i = 0; i < hat.size(); ++i)
    hat[i] += (sigma * std::norm(f.values[i]) + (trap ? (*trap)[i] : 0.0)) *
              f.values[i];
  return hat;
}

// Normalized imaginary-time gradient flow for the trapped ground state.
// Fixed dt, refined 10x when the residual stalls; the energy sequence must
// be nonincreasing at every accepted iterate.
inline GroundStateResult ground_state_imag_time(const GridSpec& grid,
                                                double sigma,
                                                const std::vector<double>& trap,
                                                double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("ground_state_imag_time: tol must be positive");
  if (trap.size() != grid.total())
    throw std::invalid_argument("ground_state_imag_time: trap size does not match grid");
  // confinement check: the external potential must reach 50 on the box faces
  double edge = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < trap.size(); ++idx) {
    const auto sub = grid.unflatten(idx);
    for (int a = 0; a < grid.dim; ++a)
      if (sub[a] == 0) {
        edge = std::min(edge, trap[idx]);
        break;
      }
  }
  if (edge < 50.0)
    throw std::invalid_argument(
        "ground_state_imag_time: trap must reach at least 50 at the box edge "
        "(got " + std::to_string(edge) + ")");

  WaveField phi = make_gaussian(grid, 0.25 * grid.length / 2.0);
  double dt = 1e-2;
  auto phase = detail::kinetic_phase(grid, dt, true);

  const double hv = grid.cell_volume();
  double energy_prev = gp_energy(phi, sigma, &trap);
  int refinements = 0;
  const int max_refinements = 3;
  int cooldown = 0;  // iterations to wait before the next refinement
  double window_residual = 1e300;
  int window_count = 0;

  const auto refine = [&] {
    dt *= 0.1;
    phase = detail::kinetic_phase(grid, dt, true);
    ++refinements;
    cooldown = 400;
    window_residual = 1e300;
    window_count = 0;
  };

  // Exact flow of d(phi)/dtau = -(W - mu + sigma |phi|^2) phi over tau: the
  // density obeys a Bernoulli equation with closed-form solution.  The
  // Rayleigh-quotient gauge shift keeps the amplitude near-constant through
  // the step; without it the density sag the nonlinearity sees degrades the
  // residual floor from O(dt^2) to O(dt).
  double mu_shift = 0.0;
  const auto diagonal_flow = [&](std::vector<cplx>& v, double tau) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double w = trap[i] - mu_shift;
      const double rho = std::norm(v[i]);
      double ratio;
      if (sigma == 0.0 || rho == 0.0) {
        ratio = std::exp(-2.0 * w * tau);
      } else if (std::abs(w) * tau < 1e-8) {
        ratio = std::exp(-2.0 * w * tau) / (1.0 + 2.0 * sigma * rho * tau);
      } else {
        ratio = w * std::exp(-2.0 * w * tau) /
                (w - sigma * rho * std::expm1(-2.0 * w * tau));
      }
      v[i] *= std::sqrt(ratio);
    }
  };

  std::vector<cplx> trial(phi.values.size());
  GroundStateResult out;
  for (int iter = 1; iter <= max_iter; ++iter) {
    trial = phi.values;
    diagonal_flow(trial, 0.5 * dt);
    detail::kinetic_step(trial, grid, phase);
    diagonal_flow(trial, 0.5 * dt);
    double nrm = 0.0;
    for (const cplx& v : trial) nrm += std::norm(v);
    nrm = 1.0 / std::sqrt(nrm * hv);
    for (cplx& v : trial) v *= nrm;

    const double energy = gp_energy(WaveField(grid, trial), sigma, &trap);
    if (energy > energy_prev + 1e-12) {
      // An uphill step means the dt-flow's fixed point (which sits O(dt^2)
      // off the true minimizer) has been reached: reject and refine.
      if (cooldown > 0) {
        --cooldown;
        continue;
      }
      if (refinements >= max_refinements)
        throw SolverError("ground_state_imag_time: energy increased by " +
                          std::to_string(energy - energy_prev) +
                          " with no refinement left - flow must be monotone");
      refine();
      continue;
    }
    phi.values.swap(trial);
    energy_prev = energy;
    if (cooldown > 0) --cooldown;

    const auto hphi = apply_gp_hamiltonian(phi, sigma, &trap);
    cplx mu_acc = 0.0;
    for (std::size_t i = 0; i < hphi.size(); ++i)
      mu_acc += std::conj(phi.values[i]) * hphi[i];
    const double mu = mu_acc.real() * hv;
    double res = 0.0;
    for (std::size_t i = 0; i < hphi.size(); ++i)
      res += std::norm(hphi[i] - mu * phi.values[i]);
    res = std::sqrt(res * hv);
    mu_shift = mu;

    if (res <= tol) {
      out.field = phi;
      out.mu = mu;
      out.energy = energy;
      out.residual = res;
      out.iterations = iter;
      return out;
    }
    // backstop stall detector: a truly flat residual window
    if (++window_count >= 500 && cooldown == 0) {
      if (res > 0.98 * window_residual && refinements < max_refinements)
        refine();
      window_residual = res;
      window_count = 0;
    } else if (window_count == 1) {
      window_residual = res;
    }
    out.residual = res;
  }
  throw SolverError("ground_state_imag_time: no convergence after " +
                    std::to_string(max_iter) +
                    " iterations, residual = " + std::to_string(out.residual));
}

// Trapped minimizer released into free (or purely nonlinear) GP flow.
struct TrapRelease {
  GroundStateResult ground;
  Trajectory free_trajectory;
};

inline TrapRelease trap_release(const GridSpec& grid, double sigma,
                                const std::vector<double>& trap, double tol,
                                int max_iter, const EvolveParams& params) {
  TrapRelease out;
  out.ground = ground_state_imag_time(grid, sigma, trap, tol, max_iter);
  out.free_trajectory = evolve_gp(out.ground.field, sigma, nullptr, params);
  return out;
}

}  // namespace gplab
