#include "pnp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pnp/error.hpp"

namespace pnp {

double total_mass(const ScalarField& field) {
  double s = 0.0;
  for (double v : field.values()) s += v;
  return s * field.grid().cell_volume();
}

double discrete_energy(const std::vector<ScalarField>& densities, const ScalarField& phi,
                       std::span<const double> fixed_charge, std::span<const double> charges,
                       const std::vector<std::span<const double>>& chemical_potentials,
                       double thermal_energy) {
  const std::size_t n = phi.size();
  const std::size_t m = densities.size();
  if (charges.size() != m || chemical_potentials.size() != m || fixed_charge.size() != n) {
    throw InvalidArgument("discrete_energy: inconsistent inputs");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    double charge = fixed_charge[c];
    double cell = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double rho = densities[i][c];
      if (rho < 0.0) {
        std::ostringstream msg;
        msg << "discrete_energy: negative density " << rho << " (species " << i << ", cell "
            << c << ")";
        throw InvalidArgument(msg.str());
      }
      if (rho > 0.0) cell += rho * (std::log(rho) - 1.0);
      cell += rho * chemical_potentials[i][c] / thermal_energy;
      charge += charges[i] * rho;
    }
    cell += 0.5 * charge * phi[c] / thermal_energy;
    sum += cell;
  }
  return sum * phi.grid().cell_volume();
}

Dissipation entropy_dissipation(const TransportOperator& op, std::span<const double> psi,
                                std::span<const double> next_density) {
  const Grid& g = op.grid();
  const std::size_t n = g.num_cells();
  if (psi.size() != n || next_density.size() != n) {
    throw InvalidArgument("entropy_dissipation: field size mismatch");
  }
  const double shift = *std::max_element(psi.begin(), psi.end());
  Dissipation out;
  for (int j = 0; j < g.dim(); ++j) {
    const std::span<const double> dface = op.face_diffusion(j);
    const double h = g.spacing(j);
    const std::size_t s = g.stride(j);
    for (std::size_t c = 0; c < n; ++c) {
      if (g.multi(c)[j] + 1 >= g.count(j)) continue;
      const double rl = next_density[c];
      const double rr = next_density[c + s];
      if (rl == 0.0 && rr == 0.0) continue;
      if (rl <= 0.0 || rr <= 0.0) {
        ++out.skipped_pairs;
        continue;
      }
      // G' = rho e^{psi - shift}, w' = mean of e^{-(psi - shift)}: the shift cancels.
      const double al = std::log(rl) + (psi[c] - shift);
      const double ar = std::log(rr) + (psi[c + s] - shift);
      const double w = slotboom_weight(psi[c] - shift, psi[c + s] - shift, op.mean());
      const double flux = dface[c] * w * (std::exp(ar) - std::exp(al)) / h;
      out.value += g.cell_volume() * flux / h * (ar - al);
    }
  }
  return out;
}

double tau_star(double thermal_energy, double eps_min, double eps_max, double d_max,
                double max_density, double sum_charge_squared, double max_psi_jump) {
  const double denom =
      4.0 * std::numbers::pi * eps_max * d_max * max_density * sum_charge_squared;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return thermal_energy * eps_min * eps_min / denom * std::exp(-max_psi_jump);
}

double max_potential_jump(const Grid& g, std::span<const double> psi) {
  double jump = 0.0;
  for (int j = 0; j < g.dim(); ++j) {
    const std::size_t s = g.stride(j);
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      if (g.multi(c)[j] + 1 >= g.count(j)) continue;
      jump = std::max(jump, std::abs(psi[c + s] - psi[c]));
    }
  }
  return jump;
}

double TauStarTracker::update(const Grid& grid, const std::vector<ScalarField>& densities,
                              const std::vector<std::vector<double>>& psi) {
  for (const auto& rho : densities) max_rho_ = std::max(max_rho_, rho.max());
  double jump = 0.0;
  for (const auto& p : psi) jump = std::max(jump, max_potential_jump(grid, p));
  estimate_ = std::min(estimate_, tau_star(kt_, eps_min_, eps_max_, d_max_, max_rho_, q2_, jump));
  return estimate_;
}

double boltzmann_constant(const ScalarField& density, std::span<const double> psi) {
  double mass = 0.0, weight = 0.0;
  for (std::size_t c = 0; c < psi.size(); ++c) {
    mass += density[c];
    weight += std::exp(-psi[c]);
  }
  return mass / weight;
}

double steady_state_residual(const std::vector<ScalarField>& densities,
                             const std::vector<std::vector<double>>& psi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const auto& rho = densities[i];
    const auto& p = psi[i];
    const double shift = *std::max_element(p.begin(), p.end());
    double mass = 0.0, weight = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      mass += rho[c];
      weight += std::exp(-(p[c] - shift));
    }
    if (mass == 0.0) continue;
    const double constant = mass / weight;
    for (std::size_t c = 0; c < p.size(); ++c) {
      const double slot = rho[c] * std::exp(p[c] - shift);
      worst = std::max(worst, std::abs(slot - constant) / constant);
    }
  }
  return worst;
}

double l1_error(const ScalarField& numeric, const AnalyticField& exact, double t) {
  const Grid& g = numeric.grid();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    sum += std::abs(exact(g.cell_center(c), t) - numeric[c]);
  }
  return sum * g.cell_volume();
}

}  // namespace pnp
