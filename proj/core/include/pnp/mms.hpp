#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/scenario.hpp"

namespace pnp::mms {

/// Exact triple, forcing terms and exact fluxes of the unit-cube accuracy
/// case. q = +1, -1; D = 1; k_BT = 1; eps = 4 pi, so the potential solves
/// -lap phi = rho_1 - rho_2 + f_3. Dirichlet planes are y = 0 and y = 1.
///
/// With X = x^2 (1-x)^2, Y = y (1-y), Z = z^2 (1-z)^2, E = e^{-t}:
///   rho_1 = 4 (X + Y) E,  rho_2 = (Y + Z) E,  phi = (X + Y + Z) E.
struct ManufacturedCase {
  AnalyticField rho1, rho2, phi;
  AnalyticField f1, f2, f3;
  /// Exact species flux -(grad rho_i + q_i rho_i grad phi) along `axis`.
  double flux(int species, int axis, const Point& p, double t) const;
};

ManufacturedCase unit_cube_case();

/// Throws Error if the exact normal flux on any no-flux face center of the
/// grid exceeds `tolerance` at time t.
void check_no_flux_faces(const ManufacturedCase& mcase, const Grid& grid,
                         const BoundarySpec& boundaries, double t, double tolerance = 1e-12);

enum class TauRule { H, H2 };
std::string to_string(TauRule rule);

struct SweepOptions {
  SchemeOrder order = SchemeOrder::First;
  TauRule tau_rule = TauRule::H2;
  bool limiter = true;
  DataTime data_time = DataTime::StepStart;
  InterfaceMean mean = InterfaceMean::Harmonic;
  SolverConfig solver;
  double end_time = 1.0;
};

/// Scenario of the case on an n^3 grid.
Scenario build_scenario(const ManufacturedCase& mcase, int n, const SweepOptions& options);

struct ErrorRow {
  int n = 0;
  double h = 0.0;
  double tau = 0.0;
  std::size_t steps = 0;
  std::array<double, 3> error{};  // rho_1, rho_2, phi
  std::array<double, 3> order{};  // vs previous row; NaN for the first
  std::size_t limiter_patches = 0;
  std::string failure;            // empty on success
};

struct ErrorTable {
  SweepOptions options;
  std::vector<ErrorRow> rows;
  void write_csv(std::ostream& out) const;
};

/// One row: runs the case to options.end_time and measures l1 errors.
ErrorRow run_case(const ManufacturedCase& mcase, int n, const SweepOptions& options);

/// Rows for strictly increasing grids; observed order log2(e_coarse/e_fine)
/// scaled by log(2)/log(n_fine/n_coarse) for non-doubling steps.
ErrorTable convergence_sweep(const std::vector<int>& grids, const SweepOptions& options);

/// Preset sweeps: "table1" (first order, tau = h), "table2" (first order,
/// tau = h^2), "table3" (second order, tau = h).
SweepOptions preset(const std::string& name);
bool is_preset(const std::string& name);

}  // namespace pnp::mms
