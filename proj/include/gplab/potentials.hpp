#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gplab/common.hpp"
#include "gplab/quadrature.hpp"

namespace gplab {

enum class PotentialKind { square_well, gaussian_bump, smooth_bump_table };

// Nonnegative, spherically symmetric interaction profile V(r) with compact
// support in [0, R].  Square wells are admitted alongside smooth profiles
// because they come with closed-form scattering oracles.
class RadialPotential {
 public:
  static RadialPotential square_well(double strength, double radius) {
    check(strength, radius);
    RadialPotential p;
    p.kind_ = PotentialKind::square_well;
    p.strength_ = strength;
    p.radius_ = radius;
    return p;
  }

  // Gaussian profile windowed by a C-infinity bump so the support is
  // exactly [0, R].
  static RadialPotential gaussian_bump(double strength, double radius) {
    check(strength, radius);
    RadialPotential p;
    p.kind_ = PotentialKind::gaussian_bump;
    p.strength_ = strength;
    p.radius_ = radius;
    return p;
  }

  // Tabulated radial profile, samples uniform on [0, R]; interpolated with
  // monotone cubic Hermite (keeps V >= 0).  The last sample must vanish.
  static RadialPotential bump_table(std::vector<double> samples,
                                    double radius) {
    if (radius <= 0.0)
      throw std::invalid_argument("bump_table: radius must be positive");
    if (samples.size() < 4)
      throw std::invalid_argument("bump_table: need at least 4 samples");
    for (double v : samples)
      if (!(v >= 0.0))
        throw std::invalid_argument("bump_table: samples must be >= 0");
    if (samples.back() != 0.0)
      throw std::invalid_argument(
          "bump_table: last sample must be 0 (compact support)");
    RadialPotential p;
    p.kind_ = PotentialKind::smooth_bump_table;
    p.strength_ = *std::max_element(samples.begin(), samples.end());
    p.radius_ = radius;
    p.table_ = std::move(samples);
    p.build_slopes();
    return p;
  }

  double operator()(double r) const {
    if (r < 0.0) throw std::domain_error("RadialPotential: negative radius");
    switch (kind_) {
      case PotentialKind::square_well:
        return r <= radius_ ? strength_ : 0.0;
      case PotentialKind::gaussian_bump:
        return bump_value(r);
      case PotentialKind::smooth_bump_table:
        return table_value(r);
    }
    return 0.0;
  }

  // Potential value for an ODE stage at radius r; for piecewise profiles
  // the branch is selected by r_branch (the midpoint of the current step),
  // which keeps Runge-Kutta stages on one side of the jump.
  double stage_value(double r, double r_branch) const {
    if (kind_ == PotentialKind::square_well)
      return r_branch < radius_ ? strength_ : 0.0;
    return operator()(std::max(r, 0.0));
  }

  double support_radius() const { return radius_; }
  double strength() const { return strength_; }
  PotentialKind kind() const { return kind_; }

  // Radii where V jumps; ODE residual stencils straddling these are skipped.
  std::vector<double> breakpoints() const {
    if (kind_ == PotentialKind::square_well && strength_ > 0.0)
      return {radius_};
    return {};
  }

 private:
  RadialPotential() = default;

  static void check(double strength, double radius) {
    if (strength < 0.0)
      throw std::invalid_argument("RadialPotential: strength must be >= 0");
    if (radius <= 0.0)
      throw std::invalid_argument("RadialPotential: radius must be positive");
  }

  double bump_value(double r) const {
    const double u = r / radius_;
    if (u >= 1.0) return 0.0;
    const double window = std::exp(1.0 - 1.0 / (1.0 - u * u));
    return strength_ * std::exp(-9.0 * u * u) * window;
  }

  double table_value(double r) const {
    if (r >= radius_) return 0.0;
    const std::size_t n = table_.size();
    const double dx = radius_ / double(n - 1);
    const double s = r / dx;
    std::size_t i = std::min(std::size_t(s), n - 2);
    const double t = s - double(i);
    const double y0 = table_[i], y1 = table_[i + 1];
    const double m0 = slopes_[i] * dx, m1 = slopes_[i + 1] * dx;
    const double t2 = t * t, t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                     (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    return std::max(v, 0.0);
  }

  // Fritsch-Carlson monotone slopes.
  void build_slopes() {
    const std::size_t n = table_.size();
    const double dx = radius_ / double(n - 1);
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      d[i] = (table_[i + 1] - table_[i]) / dx;
    slopes_.assign(n, 0.0);
    slopes_[0] = d[0];
    slopes_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      slopes_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        slopes_[i] = slopes_[i + 1] = 0.0;
        continue;
      }
      const double a = slopes_[i] / d[i], b = slopes_[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        slopes_[i] = tau * a * d[i];
        slopes_[i + 1] = tau * b * d[i];
      }
    }
  }

  PotentialKind kind_ = PotentialKind::square_well;
  double strength_ = 0.0;
  double radius_ = 1.0;
  std::vector<double> table_;
  std::vector<double> slopes_;
};

// Scaling family N^(3b-1) V(N^b r); beta = 1 reproduces N^2 V(N r).
class ScaledPotential {
 public:
  ScaledPotential(RadialPotential base, int n_particles, double beta)
      : base_(std::move(base)), n_(n_particles), beta_(beta) {
    if (n_particles < 1)
      throw std::invalid_argument("ScaledPotential: N must be >= 1");
    if (beta < 0.0 || beta > 1.0)
      throw std::invalid_argument("ScaledPotential: beta must be in [0, 1]");
    prefactor_ = std::pow(double(n_), 3.0 * beta_ - 1.0);
    arg_scale_ = std::pow(double(n_), beta_);
  }

  double operator()(double r) const { return prefactor_ * base_(arg_scale_ * r); }

  double stage_value(double r, double r_branch) const {
    return prefactor_ * base_.stage_value(arg_scale_ * r, arg_scale_ * r_branch);
  }

  double support_radius() const { return base_.support_radius() / arg_scale_; }
  double strength() const { return prefactor_ * base_.strength(); }
  const RadialPotential& base() const { return base_; }
  int n_particles() const { return n_; }
  double beta() const { return beta_; }

  std::vector<double> breakpoints() const {
    auto b = base_.breakpoints();
    for (double& r : b) r /= arg_scale_;
    return b;
  }

 private:
  RadialPotential base_;
  int n_;
  double beta_;
  double prefactor_;
  double arg_scale_;
};

// Dimensionless strength  rho = sup r^2 V(r) + int_0^inf r V(r) dr.
// The sup is taken over 1e5 uniform samples of the support (exact for
// square wells, whose sup sits at r = R).
template <class Pot>
double rho_measure(const Pot& pot) {
  const double rs = pot.support_radius();
  if (rs <= 0.0 || pot.strength() == 0.0) return 0.0;
  double sup = 0.0;
  const int samples = 100000;
  for (int i = 0; i <= samples; ++i) {
    const double r = rs * double(i) / double(samples);
    sup = std::max(sup, r * r * pot(r));
  }
  const double integral =
      adaptive_simpson([&](double r) { return r * pot(r); }, 0.0, rs, 1e-10);
  return sup + integral;
}

// Born coupling b0 = int V = 4 pi int_0^inf r^2 V(r) dr.
template <class Pot>
double born_coupling(const Pot& pot) {
  const double rs = pot.support_radius();
  if (rs <= 0.0 || pot.strength() == 0.0) return 0.0;
  return 4.0 * kPi *
         adaptive_simpson([&](double r) { return r * r * pot(r); }, 0.0, rs,
                          1e-10);
}

}  // namespace gplab
