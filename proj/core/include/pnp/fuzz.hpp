#pragma once

#include <cstdint>
#include <random>

#include "pnp/scenario.hpp"

namespace pnp {

/// Random admissible scenario for positivity fuzzing: d in {1, 2, 3}, at
/// most `max_cells` per axis, non-negative rho^0 with zero cells, random
/// positive D and eps, random smooth fixed charge and chemical potentials
/// (psi spreads of tens of k_BT, so e^{-psi} varies by many decades),
/// random Dirichlet planes with non-negative traces, tau from {1e-3, 1, 1e3}.
Scenario random_scenario(std::mt19937_64& rng, int max_cells = 16);

struct PositivityCheck {
  std::size_t steps = 0;
  /// min over steps and species of min(rho) / max(rho); >= 0 is ideal.
  double worst_ratio = 0.0;
  /// Stopped before `steps`: a huge step can pile up so much charge that psi
  /// spreads past 250 k_BT; beyond that the Krylov inner products of
  /// G ~ e^{psi} leave the double range.
  bool truncated = false;
};

/// Takes up to `steps` first-order steps (always at least one) and records
/// the worst relative minimum.
PositivityCheck check_first_order_positivity(const Scenario& scenario, std::size_t steps);

}  // namespace pnp
