#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gplab/common.hpp"
#include "gplab/density_matrix.hpp"
#include "gplab/dynamics.hpp"
#include "gplab/fft.hpp"
#include "gplab/fields.hpp"
#include "gplab/grid.hpp"

namespace gplab {

// Symmetric N-particle state on a 1D periodic grid; particle 0 is the
// fastest axis of the flattened tensor.
struct ManyBodyState {
  int n_particles = 1;
  GridSpec grid;
  std::vector<cplx> tensor;

  ManyBodyState() = default;
  ManyBodyState(int n, const GridSpec& g) : n_particles(n), grid(g) {
    if (g.dim != 1)
      throw std::invalid_argument("ManyBodyState: one-dimensional grids only");
    if (n < 1) throw std::invalid_argument("ManyBodyState: N must be >= 1");
    tensor.assign(check_size(n, g), cplx(0.0));
  }

  std::size_t size() const { return tensor.size(); }

  static std::size_t check_size(int n, const GridSpec& g) {
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) {
      if (total > kMemoryBudgetBytes / sizeof(cplx) / g.points) {
        int fit = 0;
        std::size_t t = 1;
        while (t <= kMemoryBudgetBytes / sizeof(cplx) / g.points) {
          t *= g.points;
          ++fit;
        }
        throw SizeError("ManyBodyState: n^N = " + std::to_string(g.points) + "^" +
                        std::to_string(n) + " tensor exceeds the 2 GiB budget; "
                        "n = " + std::to_string(g.points) + " supports N <= " +
                        std::to_string(fit));
      }
      total *= g.points;
    }
    return total;
  }
};

inline double mb_norm(const ManyBodyState& s) {
  double acc = 0.0;
  for (const cplx& v : s.tensor) acc += std::norm(v);
  return std::sqrt(acc * std::pow(s.grid.spacing(), s.n_particles));
}

inline void mb_normalize(ManyBodyState& s) {
  const double nrm = mb_norm(s);
  if (nrm == 0.0) throw std::invalid_argument("mb_normalize: zero state");
  for (cplx& v : s.tensor) v /= nrm;
}

inline cplx mb_inner(const ManyBodyState& a, const ManyBodyState& b) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.tensor.size(); ++i)
    acc += std::conj(a.tensor[i]) * b.tensor[i];
  return acc * std::pow(a.grid.spacing(), a.n_particles);
}

// Pair potential tabulated over the raw separation index (i - j) mod n.
template <class F>
std::vector<double> sample_pair_table(const GridSpec& g, const F& profile) {
  std::vector<double> t(g.points);
  for (std::size_t d = 0; d < g.points; ++d)
    t[d] = profile(g.min_image_distance(d, 0));
  return t;
}

// sum_{i<j} U(x_i - x_j) + sum_j trap(x_j) on the diagonal.
inline std::vector<double> diagonal_potential(const GridSpec& g, int n_particles,
                                              const std::vector<double>* pair_table,
                                              const std::vector<double>* trap) {
  const std::size_t n = g.points;
  std::size_t total = 1;
  for (int j = 0; j < n_particles; ++j) total *= n;
  std::vector<double> diag(total, 0.0);
  std::array<std::size_t, 16> digits{};
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int j = 0; j < n_particles; ++j) {
      digits[j] = rest % n;
      rest /= n;
    }
    double v = 0.0;
    for (int i = 0; i < n_particles; ++i) {
      if (trap) v += (*trap)[digits[i]];
      if (pair_table)
        for (int j = i + 1; j < n_particles; ++j)
          v += (*pair_table)[(digits[i] - digits[j] + n) % n];
    }
    diag[idx] = v;
  }
  return diag;
}

// phi tensored N times; exactly symmetric.
inline ManyBodyState product_state(const WaveField& phi, int n_particles) {
  ManyBodyState s(n_particles, phi.grid);
  const std::size_t n = phi.grid.points;
  for (std::size_t idx = 0; idx < s.tensor.size(); ++idx) {
    cplx v = 1.0;
    std::size_t rest = idx;
    for (int j = 0; j < n_particles; ++j) {
      v *= phi.values[rest % n];
      rest /= n;
    }
    s.tensor[idx] = v;
  }
  mb_normalize(s);
  return s;
}

// prod_{i<j} f(x_i - x_j) prod_j phi(x_j), normalized; pair distances use
// the minimum image.  raw_norm (when requested) reports the norm before
// renormalization of the correlated tensor over the normalized product.
inline ManyBodyState jastrow_state(const WaveField& phi, int n_particles,
                                   const std::function<double(double)>& pair_factor,
                                   double* raw_norm = nullptr) {
  const GridSpec& g = phi.grid;
  const std::size_t n = g.points;
  std::vector<double> f(n);
  for (std::size_t d = 0; d < n; ++d) {
    f[d] = pair_factor(g.min_image_distance(d, 0));
    if (!(f[d] > 0.0))
      throw std::domain_error("jastrow_state: pair factor must be positive, got " +
                              std::to_string(f[d]) + " at separation " +
                              std::to_string(g.min_image_distance(d, 0)));
    if (f[d] > 1.0 + 1e-12)
      throw std::domain_error("jastrow_state: pair factor must stay <= 1");
  }
  ManyBodyState s = product_state(phi, n_particles);
  std::array<std::size_t, 16> digits{};
  for (std::size_t idx = 0; idx < s.tensor.size(); ++idx) {
    std::size_t rest = idx;
    for (int j = 0; j < n_particles; ++j) {
      digits[j] = rest % n;
      rest /= n;
    }
    double w = 1.0;
    for (int i = 0; i < n_particles; ++i)
      for (int j = i + 1; j < n_particles; ++j)
        w *= f[(digits[i] - digits[j] + n) % n];
    s.tensor[idx] *= w;
  }
  const double nrm = mb_norm(s);
  if (raw_norm) *raw_norm = nrm;
  for (cplx& v : s.tensor) v /= nrm;
  return s;
}

// Largest deviation under adjacent transpositions (generators of S_N).
inline double max_asymmetry(const ManyBodyState& s) {
  const std::size_t n = s.grid.points;
  double worst = 0.0;
  std::array<std::size_t, 16> digits{};
  for (int axis = 0; axis + 1 < s.n_particles; ++axis) {
    std::size_t lo = 1;
    for (int j = 0; j < axis; ++j) lo *= n;
    const std::size_t hi = lo * n;
    for (std::size_t idx = 0; idx < s.tensor.size(); ++idx) {
      const std::size_t a = (idx / lo) % n, b = (idx / hi) % n;
      if (a >= b) continue;
      const std::size_t swapped = idx + (b - a) * lo - (b - a) * hi;
      worst = std::max(worst, std::abs(s.tensor[idx] - s.tensor[swapped]));
    }
  }
  (void)digits;
  return worst;
}

// Average over all N! permutations of the particle slots (N <= 6 in
// practice, 720 terms).
inline void symmetrize(ManyBodyState& s) {
  const int np = s.n_particles;
  if (np == 1) return;
  const std::size_t n = s.grid.points;
  std::vector<int> perm(np);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<cplx> acc(s.tensor.size(), cplx(0.0));
  std::vector<std::size_t> strides(np);
  std::size_t st = 1;
  for (int j = 0; j < np; ++j) {
    strides[j] = st;
    st *= n;
  }
  std::array<std::size_t, 16> digits{};
  std::size_t count = 0;
  do {
    ++count;
    for (std::size_t idx = 0; idx < s.tensor.size(); ++idx) {
      std::size_t rest = idx;
      for (int j = 0; j < np; ++j) {
        digits[j] = rest % n;
        rest /= n;
      }
      std::size_t target = 0;
      for (int j = 0; j < np; ++j) target += digits[perm[j]] * strides[j];
      acc[target] += s.tensor[idx];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double inv = 1.0 / double(count);
  for (std::size_t i = 0; i < acc.size(); ++i) s.tensor[i] = acc[i] * inv;
}

// H psi with spectral kinetic term per axis and diagonal pair + trap
// potentials; matrix-free, returns an unnormalized state.
inline ManyBodyState apply_hamiltonian(const ManyBodyState& s,
                                       const std::vector<double>* pair_table,
                                       const std::vector<double>* trap) {
  const GridSpec& g = s.grid;
  const std::size_t n = g.points;
  ManyBodyState out(s.n_particles, g);
  const auto diag = diagonal_potential(g, s.n_particles, pair_table, trap);
  for (std::size_t i = 0; i < s.tensor.size(); ++i)
    out.tensor[i] = diag[i] * s.tensor[i];

  std::vector<cplx> k2(n);
  for (std::size_t i = 0; i < n; ++i)
    k2[i] = g.wavenumber(i) * g.wavenumber(i);
  std::vector<cplx> work(s.tensor.size());
  std::size_t stride = 1;
  for (int axis = 0; axis < s.n_particles; ++axis) {
    work = s.tensor;
    fft_axis(work.data(), work.size(), n, stride, false, k2.data());
    fft_axis(work.data(), work.size(), n, stride, true);
    for (std::size_t i = 0; i < work.size(); ++i) out.tensor[i] += work[i];
    stride *= n;
  }
  return out;
}

struct ManyBodyTrajectory {
  GridSpec grid;
  int n_particles = 1;
  std::vector<double> times;
  std::vector<std::vector<cplx>> states;

  ManyBodyState state_at(std::size_t i) const {
    ManyBodyState s(n_particles, grid);
    s.tensor = states[i];
    return s;
  }
};

// Strang splitting with diagonal pair + trap phases and per-axis Fourier
// kinetic steps; permutation symmetry is preserved exactly.
inline ManyBodyTrajectory evolve_exact(const ManyBodyState& initial,
                                       const std::vector<double>* pair_table,
                                       const std::vector<double>* trap,
                                       const EvolveParams& params) {
  const GridSpec& g = initial.grid;
  const std::size_t n = g.points;
  const std::int64_t steps = params.steps();

  const auto diag = diagonal_potential(g, initial.n_particles, pair_table, trap);
  std::vector<cplx> half_phase(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i)
    half_phase[i] = std::polar(1.0, -0.5 * params.dt * diag[i]);
  std::vector<cplx> kin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = g.wavenumber(i);
    kin[i] = std::polar(1.0, -params.dt * k * k);
  }

  ManyBodyTrajectory traj;
  traj.grid = g;
  traj.n_particles = initial.n_particles;
  traj.times.push_back(0.0);
  traj.states.push_back(initial.tensor);

  std::vector<cplx> psi = initial.tensor;
  for (std::int64_t step = 1; step <= steps; ++step) {
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_phase[i];
    std::size_t stride = 1;
    for (int axis = 0; axis < initial.n_particles; ++axis) {
      fft_axis(psi.data(), psi.size(), n, stride, false, kin.data());
      stride *= n;
    }
    stride = 1;
    for (int axis = 0; axis < initial.n_particles; ++axis) {
      fft_axis(psi.data(), psi.size(), n, stride, true);
      stride *= n;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_phase[i];
    detail::check_finite(psi, step);
    if (step % params.record_every == 0 || step == steps) {
      traj.times.push_back(double(step) * params.dt);
      traj.states.push_back(psi);
    }
  }
  return traj;
}

// Imaginary-time flow in the symmetric subspace (symmetrized every step).
inline ManyBodyState ground_state_manybody(const GridSpec& grid, int n_particles,
                                           const std::vector<double>* pair_table,
                                           const std::vector<double>& trap,
                                           double tol, int max_iter,
                                           double* energy_out = nullptr) {
  if (!(tol > 0.0))
    throw std::invalid_argument("ground_state_manybody: tol must be positive");
  double edge = trap[0];
  if (edge < 50.0)
    throw std::invalid_argument(
        "ground_state_manybody: trap must reach at least 50 at the box edge");

  const std::size_t n = grid.points;
  const auto diag = diagonal_potential(grid, n_particles, pair_table, &trap);
  const double hv = std::pow(grid.spacing(), n_particles);

  ManyBodyState psi = product_state(make_gaussian(grid, 0.125 * grid.length),
                                    n_particles);
  double dt = 1e-2;
  const auto make_tables = [&](double step) {
    std::pair<std::vector<double>, std::vector<cplx>> t;
    t.first.resize(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i)
      t.first[i] = std::exp(-0.5 * step * diag[i]);
    t.second.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double k = grid.wavenumber(i);
      t.second[i] = std::exp(-step * k * k);
    }
    return t;
  };
  auto tables = make_tables(dt);

  double energy_prev = 1e300;
  int refinements = 0, cooldown = 0;
  const int max_refinements = 3;
  std::vector<cplx> trial;
  double last_res = 0.0;
  double window_residual = 1e300;
  int window_count = 0;

  for (int iter = 1; iter <= max_iter; ++iter) {
    trial = psi.tensor;
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] *= tables.first[i];
    std::size_t stride = 1;
    for (int axis = 0; axis < n_particles; ++axis) {
      fft_axis(trial.data(), trial.size(), n, stride, false, tables.second.data());
      stride *= n;
    }
    stride = 1;
    for (int axis = 0; axis < n_particles; ++axis) {
      fft_axis(trial.data(), trial.size(), n, stride, true);
      stride *= n;
    }
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] *= tables.first[i];

    ManyBodyState cand(n_particles, grid);
    cand.tensor.swap(trial);
    symmetrize(cand);
    mb_normalize(cand);

    const auto hpsi = apply_hamiltonian(cand, pair_table, &trap);
    const double energy = (mb_inner(cand, hpsi)).real();
    if (energy > energy_prev + 1e-12) {
      if (cooldown > 0) {
        --cooldown;
        continue;
      }
      if (refinements >= max_refinements)
        throw SolverError("ground_state_manybody: energy increased with no "
                          "refinement left");
      dt *= 0.1;
      tables = make_tables(dt);
      ++refinements;
      cooldown = 400;
      window_residual = 1e300;
      window_count = 0;
      continue;
    }
    psi = cand;
    energy_prev = energy;
    if (cooldown > 0) --cooldown;

    double res = 0.0;
    for (std::size_t i = 0; i < hpsi.tensor.size(); ++i)
      res += std::norm(hpsi.tensor[i] - energy * psi.tensor[i]);
    res = std::sqrt(res * hv);
    last_res = res;
    if (res <= tol) {
      if (energy_out) *energy_out = energy;
      return psi;
    }
    // backstop: refine when a long residual window is flat
    if (++window_count >= 500 && cooldown == 0) {
      if (res > 0.98 * window_residual && refinements < max_refinements) {
        dt *= 0.1;
        tables = make_tables(dt);
        ++refinements;
        cooldown = 400;
      }
      window_residual = res;
      window_count = 0;
    } else if (window_count == 1) {
      window_residual = res;
    }
  }
  throw SolverError("ground_state_manybody: no convergence after " +
                    std::to_string(max_iter) + " iterations, residual = " +
                    std::to_string(last_res));
}

// Partial trace over particles k+1..N by tensor contraction.
inline DensityMatrixK marginal(const ManyBodyState& s, int k) {
  if (k < 1 || k > s.n_particles)
    throw std::invalid_argument("marginal: need 1 <= k <= N");
  DensityMatrixK g(k, s.grid);
  const std::size_t d = g.side();
  const std::size_t rest = s.tensor.size() / d;
  const double weight = std::pow(s.grid.spacing(), s.n_particles - k);
  for (std::size_t c = 0; c < rest; ++c) {
    const cplx* block = s.tensor.data() + c * d;
    for (std::size_t r = 0; r < d; ++r) {
      const cplx vr = block[r];
      cplx* row = g.kernel.data() + r * d;
      for (std::size_t rp = 0; rp < d; ++rp)
        row[rp] += vr * std::conj(block[rp]);
    }
  }
  for (cplx& v : g.kernel) v *= weight;
  return g;
}

// <psi, H psi> / N with the product-state comparator alongside.
struct EnergyPerParticle {
  double value = 0.0;       // <psi, H psi> / N
  double kinetic = 0.0;     // kinetic part per particle
  double interaction = 0.0; // pair part per particle
};

inline EnergyPerParticle energy_per_particle(const ManyBodyState& s,
                                             const std::vector<double>* pair_table,
                                             const std::vector<double>* trap) {
  EnergyPerParticle out;
  const auto h_full = apply_hamiltonian(s, pair_table, trap);
  const auto h_free = apply_hamiltonian(s, nullptr, trap);
  const double inv_n = 1.0 / double(s.n_particles);
  out.value = mb_inner(s, h_full).real() * inv_n;
  const double free_part = mb_inner(s, h_free).real() * inv_n;
  out.kinetic = free_part;
  out.interaction = out.value - free_part;
  return out;
}

// Product-state energy per particle: kinetic + (N-1)/2 * pair quadrature,
// with the large-N form kinetic + (b_eff/2) int |phi|^4, b_eff = N int U.
struct ProductComparator {
  double finite_n = 0.0;
  double large_n = 0.0;
  double b_eff = 0.0;
};

inline ProductComparator product_energy_comparator(const WaveField& phi, int n_particles,
                                                   const std::vector<double>& pair_table) {
  const GridSpec& g = phi.grid;
  const double h = g.spacing();
  const std::size_t n = g.points;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      quad += pair_table[(i - j + n) % n] * std::norm(phi.values[i]) *
              std::norm(phi.values[j]);
  quad *= h * h;
  double quartic = 0.0;
  for (std::size_t i = 0; i < n; ++i) quartic += std::norm(phi.values[i]) *
                                                 std::norm(phi.values[i]);
  quartic *= h;
  double table_integral = 0.0;
  for (std::size_t d = 0; d < n; ++d) table_integral += pair_table[d] * h;

  ProductComparator out;
  const double kinetic = grad_norm_sq(phi);
  out.b_eff = double(n_particles) * table_integral;
  out.finite_n = kinetic + 0.5 * double(n_particles - 1) * quad;
  out.large_n = kinetic + 0.5 * out.b_eff * quartic;
  return out;
}

}  // namespace gplab
