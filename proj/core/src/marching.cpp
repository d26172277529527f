#include "pnp/marching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pnp/error.hpp"
#include "pnp/limiter.hpp"

namespace pnp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Scenario& validated(const Scenario& s) {
  s.validate();
  return s;
}

std::vector<TransportOperator> build_transport(const Scenario& s) {
  std::vector<TransportOperator> ops;
  ops.reserve(s.species.size());
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    ops.emplace_back(s.grid, s.species[i], i, s.boundaries, s.thermal_energy, s.mean);
  }
  return ops;
}

std::vector<ScalarField> sample_densities(const Scenario& s) {
  std::vector<ScalarField> rho;
  for (const auto& sp : s.species) {
    ScalarField r = sample_initial(s.grid, sp.initial);
    if (r.min() < 0.0) {
      throw InvalidArgument("initial density of species '" + sp.name + "' is negative");
    }
    rho.push_back(std::move(r));
  }
  return rho;
}

// Prefixes solver failures with the system that failed.
template <class F>
auto with_context(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const SolverError& e) {
    throw SolverError(what + ": " + e.what(), e.residual(), e.iterations());
  }
}

bool all_non_negative(const std::vector<ScalarField>& rho) {
  for (const auto& r : rho) {
    if (r.min() < 0.0) return false;
  }
  return true;
}

}  // namespace

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)),
      poisson_(validated(scenario_).grid, scenario_.permittivity, scenario_.boundaries),
      transport_(build_transport(scenario_)) {
  if (scenario_.neutralize_fixed_charge && poisson_.gauge() == GaugeMode::PureNeumann) {
    // sum q_i rho_i has a conserved mean under no-flux walls
    const auto rho = sample_densities(scenario_);
    const std::vector<double> zero(grid().num_cells(), 0.0);
    const auto ions = charge_density(zero, rho, charges());
    double sum = 0.0;
    for (double v : ions) sum += v;
    charge_offset_ = sum / static_cast<double>(ions.size());
  }
}

std::vector<double> Simulation::charges() const {
  std::vector<double> q;
  for (const auto& s : scenario_.species) q.push_back(s.charge);
  return q;
}

std::vector<double> Simulation::fixed_charge(double t) const {
  const Grid& g = grid();
  std::vector<double> f(g.num_cells());
  for (std::size_t c = 0; c < f.size(); ++c) f[c] = scenario_.fixed_charge(g.cell_center(c), t);
  if (scenario_.neutralize_fixed_charge && poisson_.gauge() == GaugeMode::PureNeumann) {
    double sum = 0.0;
    for (double v : f) sum += v;
    const double shift = sum / static_cast<double>(f.size()) + charge_offset_;
    for (double& v : f) v -= shift;
  }
  return f;
}

ScalarField Simulation::solve_potential(const std::vector<ScalarField>& densities, double t,
                                        std::span<const double> guess, int* iterations) const {
  const auto f = fixed_charge(t);
  const auto q = charges();
  const PoissonSystem sys = poisson_.assemble(charge_density(f, densities, q), t);
  return with_context("Poisson solve", [&] {
    return solve_poisson(scenario_.grid, sys, scenario_.solver, guess, iterations);
  });
}

double Simulation::energy(const State& state) const {
  if (!all_non_negative(state.densities)) return kNaN;
  std::vector<std::span<const double>> mu;
  for (const auto& op : transport_) mu.push_back(op.chemical_potential());
  const auto f = fixed_charge(state.time);
  const auto q = charges();
  return discrete_energy(state.densities, state.phi, f, q, mu, scenario_.thermal_energy);
}

State Simulation::init_state() const {
  State s;
  s.time = 0.0;
  s.densities = sample_densities(scenario_);
  s.phi = solve_potential(s.densities, 0.0, {}, nullptr);
  for (const auto& op : transport_) s.psi.push_back(op.psi(s.phi.values()));
  s.energy = energy(s);

  double q2 = 0.0;
  for (const auto& sp : scenario_.species) q2 += sp.charge * sp.charge;
  double d_max = 0.0;
  for (const auto& op : transport_) d_max = std::max(d_max, op.max_diffusion());
  s.tau_star.emplace(scenario_.thermal_energy, poisson_.min_permittivity(),
                     poisson_.max_permittivity(), d_max, q2);
  s.tau_star->update(grid(), s.densities, s.psi);
  return s;
}

void Simulation::finish_step(State& state, StepReport& report, double old_energy) const {
  report.step = state.step;
  report.time = state.time;
  report.masses.clear();
  report.min_density = std::numeric_limits<double>::infinity();
  for (const auto& r : state.densities) {
    report.masses.push_back(total_mass(r));
    report.min_density = std::min(report.min_density, r.min());
  }
  state.energy = energy(state);
  report.energy = state.energy;
  report.energy_change = state.energy - old_energy;
  report.energy_margin = report.second_order
                             ? kNaN
                             : report.energy_change + 0.5 * report.tau * report.dissipation;
  report.tau_star = state.tau_star ? state.tau_star->update(grid(), state.densities, state.psi)
                                   : kNaN;
}

StepReport Simulation::step_first_order(State& state, double tau) const {
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  const double t_n = state.time;
  const double t_next = t_n + tau;
  StepReport report;
  report.tau = tau;

  std::vector<ScalarField> next;
  next.reserve(transport_.size());
  for (std::size_t i = 0; i < transport_.size(); ++i) {
    const TransportOperator& op = transport_[i];
    DensityStepData data;
    data.density = state.densities[i].values();
    data.psi = state.psi[i];
    data.boundary_psi = [&](const FaceId& f) { return op.boundary_psi(f, t_n); };
    data.tau = tau;
    data.trace_time = scenario_.data_time == DataTime::StepStart ? t_n : t_next;
    data.source_time = data.trace_time;
    data.allow_negative_density = false;
    const DensitySystem sys = op.assemble(data);
    const auto guess = sys.slotboom(data.density);
    const SolveResult r = with_context("density solve for species '" + op.species().name + "'",
                                       [&] { return solve(sys.matrix, sys.rhs, scenario_.solver, guess); });
    report.solver_iterations += r.iterations;
    next.emplace_back(scenario_.grid, sys.recover(r.x));

    const Dissipation dis = entropy_dissipation(op, state.psi[i], next.back().values());
    report.dissipation += dis.value;
    report.dissipation_skipped += dis.skipped_pairs;
  }

  int poisson_iterations = 0;
  ScalarField phi = solve_potential(next, t_next, state.phi.values(), &poisson_iterations);
  report.solver_iterations += poisson_iterations;

  const double old_energy = state.energy;
  state.prev_psi = std::move(state.psi);
  state.prev_time = t_n;
  state.densities = std::move(next);
  state.phi = std::move(phi);
  state.psi.clear();
  for (const auto& op : transport_) state.psi.push_back(op.psi(state.phi.values()));
  state.time = t_next;
  state.step += 1;
  finish_step(state, report, old_energy);
  return report;
}

std::vector<double> Simulation::extrapolated_psi(const State& state, std::size_t i,
                                                 double tau) const {
  const double ratio = 0.5 * tau / (state.time - state.prev_time);
  const auto& now = state.psi[i];
  const auto& before = state.prev_psi[i];
  std::vector<double> out(now.size());
  for (std::size_t c = 0; c < now.size(); ++c) out[c] = now[c] + ratio * (now[c] - before[c]);
  return out;
}

double Simulation::extrapolated_boundary_psi(const State& state, std::size_t i,
                                             const FaceId& f, double tau) const {
  const double ratio = 0.5 * tau / (state.time - state.prev_time);
  const double now = transport_[i].boundary_psi(f, state.time);
  const double before = transport_[i].boundary_psi(f, state.prev_time);
  return now + ratio * (now - before);
}

StepReport Simulation::step_second_order(State& state, double tau, bool limiter_on) const {
  if (!(tau > 0.0)) throw InvalidArgument("time step must be positive");
  if (!state.has_previous()) {
    throw InvalidArgument("second-order step needs psi^{n-1}; take a first-order step first");
  }
  const double t_n = state.time;
  const double t_half = t_n + 0.5 * tau;
  const double t_next = t_n + tau;
  StepReport report;
  report.tau = tau;
  report.second_order = true;
  report.dissipation = kNaN;

  std::vector<ScalarField> next;
  next.reserve(transport_.size());
  for (std::size_t i = 0; i < transport_.size(); ++i) {
    const TransportOperator& op = transport_[i];
    const auto psi_star = extrapolated_psi(state, i, tau);
    DensityStepData data;
    data.density = state.densities[i].values();
    data.psi = psi_star;
    data.boundary_psi = [&](const FaceId& f) {
      return extrapolated_boundary_psi(state, i, f, tau);
    };
    data.tau = 0.5 * tau;
    data.trace_time = t_half;
    data.source_time = t_half;
    data.allow_negative_density = !limiter_on;
    const DensitySystem sys = op.assemble(data);
    const auto guess = sys.slotboom(data.density);
    const SolveResult r = with_context("density solve for species '" + op.species().name + "'",
                                       [&] { return solve(sys.matrix, sys.rhs, scenario_.solver, guess); });
    report.solver_iterations += r.iterations;

    const auto predictor = sys.recover(r.x);
    ScalarField corrected(scenario_.grid);
    for (std::size_t c = 0; c < corrected.size(); ++c) {
      corrected[c] = 2.0 * predictor[c] - data.density[c];
    }
    if (limiter_on && corrected.min() < 0.0) {
      LimiterResult limited = apply_limiter(corrected);
      for (const auto& p : limited.patches) {
        report.limiter_max_patch = std::max(report.limiter_max_patch, p.cells.size());
        report.limiter_min_theta = std::min(report.limiter_min_theta, p.theta);
      }
      report.limiter_patches += limited.patches.size();
      corrected = std::move(limited.field);
    }
    next.push_back(std::move(corrected));
  }

  int poisson_iterations = 0;
  ScalarField phi = solve_potential(next, t_next, state.phi.values(), &poisson_iterations);
  report.solver_iterations += poisson_iterations;

  const double old_energy = state.energy;
  state.prev_psi = std::move(state.psi);
  state.prev_time = t_n;
  state.densities = std::move(next);
  state.phi = std::move(phi);
  state.psi.clear();
  for (const auto& op : transport_) state.psi.push_back(op.psi(state.phi.values()));
  state.time = t_next;
  state.step += 1;
  finish_step(state, report, old_energy);
  return report;
}

double Simulation::second_order_positivity_bound(const State& state, double tau) const {
  if (!state.has_previous()) throw InvalidArgument("positivity bound needs psi^{n-1}");
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < transport_.size(); ++i) {
    const auto psi_star = extrapolated_psi(state, i, tau);
    const double shift = *std::max_element(psi_star.begin(), psi_star.end());
    const auto sum = transport_[i].off_diagonal_sum(
        psi_star, [&](const FaceId& f) { return extrapolated_boundary_psi(state, i, f, tau); },
        shift);
    for (std::size_t c = 0; c < sum.size(); ++c) {
      if (sum[c] <= 0.0) continue;
      bound = std::min(bound, std::exp(-(psi_star[c] - shift)) / sum[c]);
    }
  }
  return bound;
}

RunResult Simulation::run(const StepCallback& callback) const {
  return run(init_state(), callback);
}

RunResult Simulation::run(State initial, const StepCallback& callback) const {
  RunResult out;
  out.state = std::move(initial);
  const double end = scenario_.end_time;
  const double tau = scenario_.tau;
  State& s = out.state;
  // n_steps = ceil(end / tau); t_k = k tau, the last step is truncated at end.
  const auto n_steps =
      static_cast<std::size_t>(std::ceil(end / tau - 1e-9));
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t_next = std::min(end, static_cast<double>(k + 1) * tau);
    if (t_next <= s.time) continue;
    const double step = t_next - s.time;
    StepReport r = (scenario_.order == SchemeOrder::Second && s.has_previous())
                       ? step_second_order(s, step, scenario_.limiter)
                       : step_first_order(s, step);
    s.time = t_next;
    r.time = t_next;
    if (callback) callback(s, r);
    out.reports.push_back(std::move(r));
  }
  return out;
}

SteadyResult Simulation::run_to_steady(double tolerance, std::size_t max_steps,
                                       const StepCallback& callback) const {
  if (poisson_.gauge() != GaugeMode::PureNeumann) {
    throw InvalidArgument("steady-state marching requires no-flux conditions on every face");
  }
  SteadyResult out;
  out.state = init_state();
  out.residual = steady_state_residual(out.state.densities, out.state.psi);
  while (out.residual >= tolerance) {
    if (out.steps >= max_steps) {
      std::ostringstream msg;
      msg << "steady state not reached in " << max_steps << " steps; residual "
          << out.residual;
      throw Error(msg.str());
    }
    StepReport r = step_first_order(out.state, scenario_.tau);
    ++out.steps;
    out.residual = steady_state_residual(out.state.densities, out.state.psi);
    if (callback) callback(out.state, r);
  }
  for (std::size_t i = 0; i < out.state.densities.size(); ++i) {
    out.boltzmann_constants.push_back(
        boltzmann_constant(out.state.densities[i], out.state.psi[i]));
  }
  return out;
}

}  // namespace pnp
