#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "pnp/diagnostics.hpp"
#include "pnp/poisson.hpp"
#include "pnp/scenario.hpp"

namespace pnp {

struct State {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<ScalarField> densities;
  ScalarField phi;
  std::vector<std::vector<double>> psi;        // psi^n per species
  std::vector<std::vector<double>> prev_psi;   // psi^{n-1}; empty before the first step
  double prev_time = 0.0;
  double energy = 0.0;                         // E_h^n, NaN if undefined
  std::optional<TauStarTracker> tau_star;

  bool has_previous() const noexcept { return !prev_psi.empty(); }
};

struct StepReport {
  std::size_t step = 0;
  double time = 0.0;
  double tau = 0.0;
  bool second_order = false;
  std::vector<double> masses;
  double energy = 0.0;
  double energy_change = 0.0;     // E^{n+1} - E^n
  double dissipation = 0.0;       // I^n (first-order steps; NaN otherwise)
  std::size_t dissipation_skipped = 0;
  double energy_margin = 0.0;     // E^{n+1} - E^n + tau/2 I^n, should be <= 0
  double min_density = 0.0;
  double tau_star = 0.0;
  std::size_t limiter_patches = 0;
  std::size_t limiter_max_patch = 0;
  double limiter_min_theta = 1.0;
  int solver_iterations = 0;
};

using StepCallback = std::function<void(const State&, const StepReport&)>;

struct RunResult {
  State state;
  std::vector<StepReport> reports;
};

struct SteadyResult {
  State state;
  std::vector<double> boltzmann_constants;
  double residual = 0.0;
  std::size_t steps = 0;
};

/// Time integrators for one scenario. Operators that do not change in time
/// (Poisson matrix, face diffusion, chemical potential) are built once.
///
/// First order: each species is updated with psi^n through the Slotboom
/// system, then phi^{n+1} is solved from rho^{n+1}.
/// Second order: predictor rho* over tau/2 with the extrapolated potential
/// psi^n + (tau/2)(psi^n - psi^{n-1})/(t_n - t_{n-1}), corrector
/// rho^{n+1} = 2 rho* - rho^n, optional limiter, then the Poisson solve.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);

  const Scenario& scenario() const noexcept { return scenario_; }
  const Grid& grid() const noexcept { return *scenario_.grid; }
  const PoissonOperator& poisson() const noexcept { return poisson_; }
  const TransportOperator& transport(std::size_t i) const { return transport_.at(i); }

  /// Midpoint-sampled rho^0, phi^0 from the Poisson solve, psi^0.
  State init_state() const;

  StepReport step_first_order(State& state, double tau) const;
  StepReport step_second_order(State& state, double tau, bool limiter_on) const;

  /// Marches to scenario().end_time; second-order runs take their first step
  /// with the first-order scheme.
  RunResult run(const StepCallback& callback = {}) const;
  /// Same, starting from `initial` (normally init_state()).
  RunResult run(State initial, const StepCallback& callback) const;

  /// First-order steps until steady_state_residual < tolerance. Requires all
  /// faces to be no-flux.
  SteadyResult run_to_steady(double tolerance, std::size_t max_steps,
                             const StepCallback& callback = {}) const;

  /// Effective fixed charge (after neutralization) sampled at time t.
  std::vector<double> fixed_charge(double t) const;
  double energy(const State& state) const;
  /// Bound on tau below which the next second-order step keeps every density
  /// non-negative without the limiter: min over species and cells of
  /// e^{-psi*_a} / sum_faces D_f e^{-psi*_f} / h^2 (Dirichlet faces counted
  /// with their factor 2). Uses tau itself to place the extrapolant.
  double second_order_positivity_bound(const State& state, double tau) const;

  std::vector<double> charges() const;

 private:
  ScalarField solve_potential(const std::vector<ScalarField>& densities, double t,
                              std::span<const double> guess, int* iterations) const;
  std::vector<double> extrapolated_psi(const State& state, std::size_t i, double tau) const;
  double extrapolated_boundary_psi(const State& state, std::size_t i, const FaceId& f,
                                   double tau) const;
  void finish_step(State& state, StepReport& report, double old_energy) const;

  Scenario scenario_;
  PoissonOperator poisson_;
  std::vector<TransportOperator> transport_;
  double charge_offset_ = 0.0;
};

}  // namespace pnp
