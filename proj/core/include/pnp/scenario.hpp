#pragma once

#include <memory>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/sparse.hpp"
#include "pnp/transport.hpp"

namespace pnp {

enum class SchemeOrder { First, Second };

/// Time level of forcing f_i and Dirichlet density traces in a first-order
/// step from t_n to t_{n+1}. The second-order predictor always uses
/// t_n + tau/2.
enum class DataTime { StepStart, StepEnd };

/// Complete problem description for one run.
///
/// The potential solves -div(eps grad phi) = 4 pi (f + sum_i q_i rho_i); to
/// get div(eps grad phi) = -(f + sum q rho) pass 4 pi eps as permittivity.
struct Scenario {
  std::shared_ptr<const Grid> grid;
  std::vector<SpeciesSpec> species;
  AnalyticField permittivity = constant_field(1.0);
  AnalyticField fixed_charge = constant_field(0.0);  // f(x, t)
  /// Pure no-flux problems only: shift f(., t) by a constant so the total
  /// charge f + sum q_i rho_i has zero mean and the Poisson problem is
  /// solvable. The ionic mean is conserved, so the shift is the mean of
  /// f(., t) plus the mean of sum q_i rho_i^0.
  bool neutralize_fixed_charge = false;
  double thermal_energy = 1.0;  // k_BT
  BoundarySpec boundaries;

  SchemeOrder order = SchemeOrder::First;
  InterfaceMean mean = InterfaceMean::Harmonic;
  bool limiter = true;
  DataTime data_time = DataTime::StepStart;
  double tau = 1e-2;
  double end_time = 0.0;
  SolverConfig solver;

  /// Checks the structural invariants; field-value checks (positivity of D,
  /// eps, initial data) happen when the operators are built.
  void validate() const;
};

std::string to_string(SchemeOrder order);
std::string to_string(DataTime time);

}  // namespace pnp
