#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pnp/diagnostics.hpp"
#include "pnp/error.hpp"

using namespace pnp;

namespace {

std::shared_ptr<const Grid> grid(int dim, std::vector<double> l, std::vector<int> n) {
  return std::make_shared<const Grid>(dim, std::move(l), std::move(n));
}

SpeciesSpec species(double q) {
  SpeciesSpec s;
  s.name = "s";
  s.charge = q;
  return s;
}

}  // namespace

TEST_CASE("total mass") {
  const auto cube = grid(3, {1, 1, 1}, {4, 4, 4});
  CHECK(total_mass(ScalarField(cube, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const auto two = grid(1, {2.0}, {2});
  CHECK(total_mass(ScalarField(two, std::vector<double>{2, 0})) == 2.0);

  // 2 chi on [0, 0.25]^3 sampled at 30^3 midpoints: 8^3 cells of volume 1/27000
  const auto g = grid(3, {1, 1, 1}, {30, 30, 30});
  const ScalarField rho =
      sample_initial(g, expression_field("2*chi(x,0,0.25)*chi(y,0,0.25)*chi(z,0,0.25)"));
  CHECK(total_mass(rho) == doctest::Approx(2.0 * 512 / 27000).epsilon(1e-14));
}

TEST_CASE("discrete energy") {
  const auto g = grid(3, {1, 1, 1}, {3, 3, 3});
  const std::size_t n = g->num_cells();
  const std::vector<double> zero(n, 0.0);
  const ScalarField phi(g, 0.0);

  const std::vector<ScalarField> one{ScalarField(g, 1.0)};
  CHECK(discrete_energy(one, phi, zero, std::vector<double>{0.0}, {zero}, 1.0) ==
        doctest::Approx(-1.0).epsilon(1e-14));

  const std::vector<ScalarField> two{ScalarField(g, 1.0), ScalarField(g, 1.0)};
  CHECK(discrete_energy(two, phi, zero, std::vector<double>{1.0, -1.0}, {zero, zero}, 1.0) ==
        doctest::Approx(-2.0).epsilon(1e-14));

  const std::vector<ScalarField> none{ScalarField(g, 0.0)};
  CHECK(discrete_energy(none, phi, zero, std::vector<double>{1.0}, {zero}, 1.0) == 0.0);

  const std::vector<ScalarField> neg{ScalarField(g, -1.0)};
  CHECK_THROWS_AS(discrete_energy(neg, phi, zero, std::vector<double>{1.0}, {zero}, 1.0),
                  InvalidArgument);
}

TEST_CASE("energy electrostatic and chemical terms") {
  // one cell, |K| = 1: rho (log rho - 1) + (f + q rho) phi / 2kT + rho mu / kT
  const auto g = grid(1, {1.0}, {1});
  const std::vector<ScalarField> rho{ScalarField(g, 2.0)};
  const ScalarField phi(g, 0.5);
  const std::vector<double> f{0.3}, mu{0.7};
  const double kt = 2.0;
  const double want = 2 * (std::log(2.0) - 1) + (0.3 + 1.5 * 2) * 0.5 / (2 * kt) + 2 * 0.7 / kt;
  CHECK(discrete_energy(rho, phi, f, std::vector<double>{1.5}, {mu}, kt) ==
        doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("entropy dissipation of the two-cell step") {
  const auto g = grid(1, {2.0}, {2});
  const TransportOperator op(g, species(0.0), 0, BoundarySpec{}, 1.0, InterfaceMean::Harmonic);
  const std::vector<double> psi{0.0, 0.0};
  const std::vector<double> next{4.0 / 3, 2.0 / 3};
  const Dissipation d = entropy_dissipation(op, psi, next);
  CHECK(d.value == doctest::Approx(2.0 / 3 * std::log(2.0)).epsilon(1e-14));
  CHECK(d.skipped_pairs == 0u);

  const std::vector<double> uniform{1.0, 1.0};
  CHECK(entropy_dissipation(op, psi, uniform).value == 0.0);

  const std::vector<double> half{1.0, 0.0};
  CHECK(entropy_dissipation(op, psi, half).skipped_pairs == 1u);
}

TEST_CASE("dissipation vanishes at a Boltzmann state") {
  const auto g = grid(2, {1, 1}, {5, 4});
  const TransportOperator op(g, species(1.0), 0, BoundarySpec{}, 1.0, InterfaceMean::Geometric);
  std::vector<double> psi(g->num_cells()), rho(g->num_cells());
  for (std::size_t c = 0; c < psi.size(); ++c) {
    psi[c] = std::sin(1.0 + c);
    rho[c] = 0.4 * std::exp(-psi[c]);
  }
  CHECK(std::abs(entropy_dissipation(op, psi, rho).value) <= 1e-15);
}

TEST_CASE("tau star formula") {
  CHECK(tau_star(1, 1, 1, 1, 1, 2, 0) == doctest::Approx(1.0 / (8 * std::numbers::pi)));
  CHECK(tau_star(1, 1, 1, 1, 2, 2, 0) == doctest::Approx(1.0 / (16 * std::numbers::pi)));
  CHECK(std::isinf(tau_star(1, 1, 1, 1, 1, 0, 0)));
  CHECK(tau_star(1, 1, 1, 1, 1, 2, 1.0) ==
        doctest::Approx(std::exp(-1.0) / (8 * std::numbers::pi)));
}

TEST_CASE("tau star tracker never increases") {
  const auto g = grid(1, {1.0}, {2});
  TauStarTracker t(1, 1, 1, 1, 2);
  const std::vector<std::vector<double>> flat{{0.0, 0.0}, {0.0, 0.0}};
  t.update(*g, {ScalarField(g, 1.0), ScalarField(g, 1.0)}, flat);
  CHECK(t.value() == doctest::Approx(1.0 / (8 * std::numbers::pi)));
  t.update(*g, {ScalarField(g, 0.5), ScalarField(g, 0.5)}, flat);
  CHECK(t.value() == doctest::Approx(1.0 / (8 * std::numbers::pi)));
  t.update(*g, {ScalarField(g, 2.0), ScalarField(g, 0.5)}, flat);
  CHECK(t.value() == doctest::Approx(1.0 / (16 * std::numbers::pi)));
}

TEST_CASE("potential jump") {
  const Grid g = build_grid(2, {1, 1}, {2, 2});
  CHECK(max_potential_jump(g, std::vector<double>{0, 1, 3, 0.5}) == 3.0);
}

TEST_CASE("steady-state residual and Boltzmann constant") {
  const auto g = grid(1, {2.0}, {2});
  const std::vector<double> zero{0.0, 0.0};
  CHECK(steady_state_residual({ScalarField(g, std::vector<double>{2, 0})}, {zero}) == 1.0);
  CHECK(steady_state_residual({ScalarField(g, 1.5)}, {zero}) == 0.0);
  CHECK(steady_state_residual({ScalarField(g, 0.0)}, {zero}) == 0.0);

  const std::vector<double> psi{0.3, -1.1};
  const ScalarField rho(g, std::vector<double>{2.0 * std::exp(-0.3), 2.0 * std::exp(1.1)});
  CHECK(boltzmann_constant(rho, psi) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(steady_state_residual({rho}, {psi}) <= 1e-15);
}

TEST_CASE("l1 error") {
  const auto g = grid(2, {1, 1}, {4, 4});
  const AnalyticField f = expression_field("x*y + t");
  const ScalarField exact = sample_initial(g, f, 0.5);
  CHECK(l1_error(exact, f, 0.5) == 0.0);
  ScalarField off = exact;
  for (std::size_t c = 0; c < off.size(); ++c) off[c] += 0.25;
  CHECK(l1_error(off, f, 0.5) == doctest::Approx(0.25).epsilon(1e-14));
}
