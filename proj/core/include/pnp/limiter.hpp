#pragma once

#include <cstddef>
#include <vector>

#include "pnp/field.hpp"

namespace pnp {

/// Neighbourhood S_beta of a negative cell beta and the scaling applied to it.
struct LimiterPatch {
  std::size_t center = 0;              // flat index of beta
  std::vector<std::size_t> cells;      // S_beta, flat indices, beta first
  int radius = 0;                      // box radius p at which the search stopped
  double average = 0.0;                // (1/|S|) sum_{S} |K| rho   (a mass)
  double min_mass = 0.0;               // min_{S} |K| rho
  double theta = 1.0;
};

/// Grows S_beta by index-space boxes of radius p = 1, 2, ... around beta,
/// clipped at the domain boundary, adding every cell with rho != 0, until the
/// volume-weighted average over S_beta is positive.
/// Throws if the box covers the whole grid without a positive average.
LimiterPatch grow_patch(const ScalarField& field, std::size_t beta);

/// Applies rho~ = theta rho + (1 - theta) avg / |K| on one patch in place.
void apply_patch(ScalarField& field, LimiterPatch& patch);

struct LimiterResult {
  ScalarField field;
  std::vector<LimiterPatch> patches;
};

/// Removes negative cells: scans lexicographically, limits one patch per
/// negative cell found, and rescans until none remain. Requires positive
/// total mass.
LimiterResult apply_limiter(const ScalarField& field);

}  // namespace pnp
