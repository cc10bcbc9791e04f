#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gplab/potentials.hpp"
#include "gplab/scattering.hpp"

using namespace gplab;

namespace {

// Analytic oracle for the square well: m = sinh(kappa r)/kappa inside,
// affine outside, kappa = sqrt(V0/2); matching gives
// a0 = R - tanh(kappa R)/kappa.
double square_well_a0(double v0, double radius) {
  const double kappa = std::sqrt(0.5 * v0);
  return radius - std::tanh(kappa * radius) / kappa;
}

double square_well_f(double v0, double radius, double r) {
  const double kappa = std::sqrt(0.5 * v0);
  const double alpha = std::cosh(kappa * radius);
  if (r >= radius) return 1.0 - square_well_a0(v0, radius) / r;
  if (r == 0.0) return 1.0 / alpha;
  return std::sinh(kappa * r) / (kappa * r * alpha);
}

// Test-only attractive well, deep enough to bind; the library's own
// potentials are nonnegative by construction.
struct AttractiveWell {
  double depth, radius;
  double operator()(double r) const { return r <= radius ? -depth : 0.0; }
  double stage_value(double, double r_branch) const {
    return r_branch < radius ? -depth : 0.0;
  }
  double support_radius() const { return radius; }
  double strength() const { return depth; }
  std::vector<double> breakpoints() const { return {radius}; }
};

}  // namespace

TEST_CASE("zero potential gives a0 = 0 and f = 1") {
  const auto sol =
      solve_zero_energy(RadialPotential::square_well(0.0, 1.0), 4.0, 1e-3);
  CHECK(std::abs(sol.a0) < 1e-13);
  for (double f : sol.f_values) CHECK(f == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("square well scattering length matches the analytic oracle") {
  const auto strong =
      solve_zero_energy(RadialPotential::square_well(2.0, 1.0), 4.0, 1e-4);
  CHECK(std::abs(strong.a0 - (1.0 - std::tanh(1.0))) <= 1e-6);
  CHECK(std::abs(strong.a0 - square_well_a0(2.0, 1.0)) <= 1e-10);

  const auto weak =
      solve_zero_energy(RadialPotential::square_well(0.02, 1.0), 4.0, 1e-4);
  CHECK(std::abs(weak.a0 - square_well_a0(0.02, 1.0)) <= 1e-10);
  CHECK(weak.a0 == Catch::Approx(0.0033200).margin(1e-6));
}

TEST_CASE("f profile matches the oracle pointwise") {
  const auto sol =
      solve_zero_energy(RadialPotential::square_well(2.0, 1.0), 4.0, 1e-4);
  for (std::size_t i = 0; i < sol.r_grid.size(); i += 997) {
    CHECK(sol.f_values[i] ==
          Catch::Approx(square_well_f(2.0, 1.0, sol.r_grid[i])).margin(1e-9));
  }
}

TEST_CASE("f stays in (0, 1] and is nondecreasing for V >= 0") {
  for (auto pot : {RadialPotential::square_well(2.0, 1.0),
                   RadialPotential::gaussian_bump(3.0, 1.0)}) {
    const auto sol = solve_zero_energy(pot, 4.0, 2e-4);
    double prev = 0.0;
    for (double f : sol.f_values) {
      CHECK(f > 0.0);
      CHECK(f <= 1.0 + 1e-12);
      CHECK(f >= prev - 1e-12);
      prev = f;
    }
  }
}

TEST_CASE("ODE defect stays below 1e-8 on the solution grid") {
  for (auto pot : {RadialPotential::square_well(2.0, 1.0),
                   RadialPotential::gaussian_bump(2.0, 1.0)}) {
    const auto sol = solve_zero_energy(pot, 4.0, 1e-4);
    CHECK(sol.ode_residual <= 1e-8);
  }
}

TEST_CASE("halving the step shrinks the a0 error at fourth order") {
  const double exact = square_well_a0(2.0, 1.0);
  const auto pot = RadialPotential::square_well(2.0, 1.0);
  const double e1 =
      std::abs(solve_zero_energy(pot, 4.0, 5e-3).a0 - exact);
  const double e2 =
      std::abs(solve_zero_energy(pot, 4.0, 2.5e-3).a0 - exact);
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("exterior deviation from 1 - a0/r is negligible") {
  const auto sol =
      solve_zero_energy(RadialPotential::square_well(2.0, 1.0), 4.0, 1e-4);
  for (std::size_t i = 0; i < sol.r_grid.size(); ++i) {
    const double r = sol.r_grid[i];
    if (r <= 1.0) continue;
    CHECK(std::abs(sol.f_values[i] - (1.0 - sol.a0 / r)) <= 1e-10);
  }
}

TEST_CASE("bound-state regime is rejected") {
  // kappa^2 = 10: m = sin(sqrt(10) r) crosses zero inside the support
  CHECK_THROWS_AS(solve_zero_energy(AttractiveWell{20.0, 1.0}, 4.0, 1e-3),
                  BoundStateError);
}

TEST_CASE("preconditions of the zero-energy solver") {
  const auto pot = RadialPotential::square_well(2.0, 1.0);
  CHECK_THROWS_AS(solve_zero_energy(pot, 0.9, 1e-4), std::domain_error);
  CHECK_THROWS_AS(solve_zero_energy(pot, 4.0, 0.1), std::invalid_argument);
}

TEST_CASE("identity int V (1-w) = 8 pi a0") {
  for (auto pot : {RadialPotential::square_well(2.0, 1.0),
                   RadialPotential::square_well(0.02, 1.0),
                   RadialPotential::gaussian_bump(2.0, 1.0)}) {
    const auto sol = solve_zero_energy(pot, 4.0, 1e-4);
    const auto check = scattering_identity_check(sol, pot);
    CHECK(check.relative);
    CHECK(check.error <= 1e-5);
  }
}

TEST_CASE("identity check flags the a0 = 0 case") {
  const auto pot = RadialPotential::square_well(0.0, 1.0);
  const auto sol = solve_zero_energy(pot, 4.0, 1e-3);
  const auto check = scattering_identity_check(sol, pot);
  CHECK_FALSE(check.relative);
  CHECK(check.error <= 1e-12);
}

TEST_CASE("identity holds for the scaled family") {
  const auto base = RadialPotential::square_well(2.0, 1.0);
  const ScaledPotential pot(base, 50, 1.0);
  const auto sol = solve_zero_energy(pot, 4.0 / 50.0, 1e-4 / 50.0);
  CHECK(sol.a0 == Catch::Approx(square_well_a0(2.0, 1.0) / 50.0).epsilon(1e-8));
  const auto check = scattering_identity_check(sol, pot);
  CHECK(check.error <= 1e-5);
}

TEST_CASE("Born bound a0 <= b0 / 8 pi") {
  const auto strong = RadialPotential::square_well(2.0, 1.0);
  const auto sol = solve_zero_energy(strong, 4.0, 1e-4);
  const auto bound = born_bound_check(sol, strong);
  CHECK(bound.holds);
  CHECK(bound.born == Catch::Approx(1.0 / 3.0).epsilon(1e-10));

  const auto weak = RadialPotential::square_well(0.02, 1.0);
  const auto wsol = solve_zero_energy(weak, 4.0, 1e-4);
  const auto wbound = born_bound_check(wsol, weak);
  CHECK(wbound.holds);
  CHECK(wbound.a0 / wbound.born == Catch::Approx(0.996).margin(5e-4));

  const auto zero = RadialPotential::square_well(0.0, 1.0);
  const auto zbound =
      born_bound_check(solve_zero_energy(zero, 4.0, 1e-3), zero);
  CHECK(zbound.holds);
}

TEST_CASE("w bounds: exterior law and trivial potential") {
  const auto pot = RadialPotential::square_well(2.0, 1.0);
  const auto sol = solve_zero_energy(pot, 4.0, 1e-4);
  const auto rep = verify_w_bounds(sol, pot);
  CHECK(rep.exterior_deviation <= 1e-8);
  CHECK(rep.f_max <= 1.0 + 1e-12);
  CHECK(rep.f_min > 0.0);

  const auto zero = RadialPotential::square_well(0.0, 1.0);
  const auto zrep = verify_w_bounds(solve_zero_energy(zero, 4.0, 1e-3), zero);
  CHECK(zrep.lower_envelope_const == 0.0);
  CHECK(zrep.grad_a_const == 0.0);
  CHECK(zrep.grad_rho_const == 0.0);
  CHECK(zrep.hess_rho_const == 0.0);
}

TEST_CASE("w-bound constants are uniform in N") {
  const auto base = RadialPotential::square_well(2.0, 1.0);
  std::vector<WBoundReport> reps;
  for (int n : {1, 10, 100}) {
    const ScaledPotential pot(base, n, 1.0);
    const auto sol = solve_zero_energy(pot, 4.0 / n, 1e-4 / n);
    reps.push_back(verify_w_bounds(sol, pot));
  }
  for (std::size_t i = 1; i < reps.size(); ++i) {
    CHECK(reps[i].lower_envelope_const ==
          Catch::Approx(reps[0].lower_envelope_const).epsilon(0.01));
    CHECK(reps[i].grad_a_const ==
          Catch::Approx(reps[0].grad_a_const).epsilon(0.01));
    CHECK(reps[i].grad_rho_const ==
          Catch::Approx(reps[0].grad_rho_const).epsilon(0.01));
    CHECK(reps[i].hess_rho_const ==
          Catch::Approx(reps[0].hess_rho_const).epsilon(0.01));
  }
}

TEST_CASE("Neumann cell: zero potential gives e = 0 and omega = 0") {
  const auto sol =
      solve_neumann_cell(RadialPotential::square_well(0.0, 1.0), 2.0);
  CHECK(sol.e_ell == 0.0);
  for (double om : sol.omega_values) CHECK(om == 0.0);
}

TEST_CASE("Neumann cell eigenvalue approaches 3 a / ell^3") {
  const auto base = RadialPotential::square_well(2.0, 1.0);
  const ScaledPotential pot(base, 100, 1.0);
  const auto sol = solve_neumann_cell(pot, 0.5);
  CHECK(sol.a == Catch::Approx(square_well_a0(2.0, 1.0) / 100.0).epsilon(1e-7));
  const double ratio = sol.e_ell * 0.5 * 0.5 * 0.5 / (3.0 * sol.a);
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
  CHECK(sol.normalization_check <= 1e-9);
  CHECK(sol.one_minus_omega_min > 0.0);
  for (double om : sol.omega_values) CHECK(1.0 - om <= 1.0 + 1e-10);
}

TEST_CASE("Neumann omega bound constant is stable in N") {
  const auto base = RadialPotential::square_well(2.0, 1.0);
  std::vector<double> consts;
  for (int n : {50, 100, 200})
    consts.push_back(
        solve_neumann_cell(ScaledPotential(base, n, 1.0), 0.5).omega_bound_const);
  for (double c : consts)
    CHECK(c == Catch::Approx(consts[0]).epsilon(0.10));
}

TEST_CASE("Neumann eigenvalue ratio error shrinks with a/ell") {
  const auto base = RadialPotential::square_well(2.0, 1.0);
  const ScaledPotential pot(base, 100, 1.0);
  const double a = square_well_a0(2.0, 1.0) / 100.0;
  double prev_err = 1e9;
  for (double q : {0.05, 0.01}) {
    const double ell = a / q;
    const auto sol = solve_neumann_cell(pot, ell);
    const double err =
        std::abs(sol.e_ell * ell * ell * ell / (3.0 * sol.a) - 1.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("Neumann preconditions") {
  const auto base = RadialPotential::square_well(2.0, 1.0);
  const ScaledPotential pot(base, 10, 1.0);
  CHECK_THROWS_AS(solve_neumann_cell(pot, 0.05), std::domain_error);
  // hard well with a0 = 1 - tanh(10)/10 = 0.9: a/ell = 0.75 is too large
  const auto hard = RadialPotential::square_well(200.0, 1.0);
  CHECK_THROWS_AS(solve_neumann_cell(hard, 1.2), std::invalid_argument);
}
