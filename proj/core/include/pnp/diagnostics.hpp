#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/transport.hpp"

namespace pnp {

/// sum_alpha |K_alpha| rho_alpha.
double total_mass(const ScalarField& field);

/// Discrete free energy
///   E_h = sum |K| [ sum_i rho_i (log rho_i - 1)
///                   + (f + sum_i q_i rho_i) phi / (2 k_BT)
///                   + sum_i rho_i mu_i / k_BT ]
/// with 0 log 0 = 0. Throws on a negative density.
double discrete_energy(const std::vector<ScalarField>& densities, const ScalarField& phi,
                       std::span<const double> fixed_charge, std::span<const double> charges,
                       const std::vector<std::span<const double>>& chemical_potentials,
                       double thermal_energy);

struct Dissipation {
  double value = 0.0;
  /// Interior face pairs where exactly one of rho_l, rho_r is zero (log
  /// undefined); they are left out of `value`.
  std::size_t skipped_pairs = 0;
};

/// Entropy dissipation of one first-order step for one species:
///   sum_j sum_{interior faces} |K| (C_f / h_j) (log G_r - log G_l),
/// C_f = D_f w_f (G_r - G_l) / h_j, G = rho^{n+1} e^{psi^n}; psi^n must be the
/// potential the step was taken with. Each summand is non-negative.
Dissipation entropy_dissipation(const TransportOperator& op, std::span<const double> psi,
                                std::span<const double> next_density);

/// Running estimate of the step size below which the first-order scheme is
/// guaranteed to dissipate the discrete energy:
///   tau* = k_BT eps_min^2 / (4 pi eps_max D_max max rho sum q_i^2)
///          * exp(-max |psi_{alpha+e_j} - psi_alpha|)
/// max rho is taken over everything observed so far and the estimate never
/// increases. +inf when sum q_i^2 = 0.
class TauStarTracker {
 public:
  TauStarTracker(double thermal_energy, double eps_min, double eps_max, double d_max,
                 double sum_charge_squared)
      : kt_(thermal_energy), eps_min_(eps_min), eps_max_(eps_max), d_max_(d_max),
        q2_(sum_charge_squared) {}

  /// Folds in one state; `psi` holds the per-species potentials.
  double update(const Grid& grid, const std::vector<ScalarField>& densities,
                const std::vector<std::vector<double>>& psi);

  double value() const noexcept { return estimate_; }
  double max_density() const noexcept { return max_rho_; }

 private:
  double kt_, eps_min_, eps_max_, d_max_, q2_;
  double max_rho_ = 0.0;
  double estimate_ = std::numeric_limits<double>::infinity();
};

/// Closed form of the estimate for given inputs (no history).
double tau_star(double thermal_energy, double eps_min, double eps_max, double d_max,
                double max_density, double sum_charge_squared, double max_psi_jump);

/// Largest |psi_{alpha+e_j} - psi_alpha| over interior faces.
double max_potential_jump(const Grid& grid, std::span<const double> psi);

/// Boltzmann constant c = sum |K| rho / sum |K| e^{-psi}.
double boltzmann_constant(const ScalarField& density, std::span<const double> psi);

/// max_i max_alpha |rho e^{psi} - c_i| / c_i, c_i = boltzmann_constant.
/// Zero-mass species contribute 0.
double steady_state_residual(const std::vector<ScalarField>& densities,
                             const std::vector<std::vector<double>>& psi);

/// Discrete l1 error sum |K| |exact(x_alpha, t) - g_alpha| using midpoint
/// samples of the exact solution.
double l1_error(const ScalarField& numeric, const AnalyticField& exact, double t);

}  // namespace pnp
