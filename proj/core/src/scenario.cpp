#include "pnp/scenario.hpp"

#include <cmath>
#include <string>

#include "pnp/error.hpp"

namespace pnp {

void Scenario::validate() const {
  if (!grid) throw InvalidArgument("scenario has no grid");
  if (species.empty()) throw InvalidArgument("scenario needs at least one species");
  if (!(thermal_energy > 0.0) || !std::isfinite(thermal_energy)) {
    throw InvalidArgument("k_BT must be positive");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("time step must be positive");
  if (!(end_time >= 0.0) || !std::isfinite(end_time)) {
    throw InvalidArgument("end time must be non-negative");
  }
  if (!permittivity || !fixed_charge) throw InvalidArgument("permittivity and fixed charge required");
  for (const auto& s : species) {
    if (!s.diffusion || !s.chemical_potential || !s.initial) {
      throw InvalidArgument("species '" + s.name + "' is missing a field");
    }
    if (!std::isfinite(s.charge)) throw InvalidArgument("species charge must be finite");
  }
  for (int j = 0; j < grid->dim(); ++j) {
    for (Side side : {Side::Minus, Side::Plus}) {
      const auto& bc = boundaries.at(j, side);
      if (bc.kind != BoundaryKind::Dirichlet) continue;
      if (!bc.potential) throw InvalidArgument("Dirichlet plane without potential trace");
      if (bc.densities.size() != species.size()) {
        throw InvalidArgument("Dirichlet plane needs one density trace per species");
      }
      for (const auto& f : bc.densities) {
        if (!f) throw InvalidArgument("Dirichlet plane with an empty density trace");
      }
    }
  }
  solver.validate();
}

std::string to_string(SchemeOrder order) {
  return order == SchemeOrder::First ? "first" : "second";
}

std::string to_string(DataTime time) {
  return time == DataTime::StepStart ? "start" : "end";
}

}  // namespace pnp
