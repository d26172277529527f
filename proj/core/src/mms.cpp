#include "pnp/mms.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "pnp/diagnostics.hpp"
#include "pnp/error.hpp"
#include "pnp/marching.hpp"

namespace pnp::mms {

namespace {

struct Poly {
  double v, d, dd;
};

// x^2 (1-x)^2 and derivatives
Poly quartic(double s) {
  return {s * s * (1 - s) * (1 - s), 2 * s * (1 - s) * (1 - 2 * s), 2 - 12 * s + 12 * s * s};
}

// y (1-y) and derivatives
Poly parabola(double s) { return {s * (1 - s), 1 - 2 * s, -2.0}; }

struct Terms {
  Poly x, y, z;
  double e;
};

Terms terms(const Point& p, double t) {
  return {quartic(p[0]), parabola(p[1]), quartic(p[2]), std::exp(-t)};
}

}  // namespace

ManufacturedCase unit_cube_case() {
  ManufacturedCase c;
  c.rho1 = [](const Point& p, double t) {
    const Terms m = terms(p, t);
    return 4 * (m.x.v + m.y.v) * m.e;
  };
  c.rho2 = [](const Point& p, double t) {
    const Terms m = terms(p, t);
    return (m.y.v + m.z.v) * m.e;
  };
  c.phi = [](const Point& p, double t) {
    const Terms m = terms(p, t);
    return (m.x.v + m.y.v + m.z.v) * m.e;
  };
  // f_1 = d_t rho_1 - lap rho_1 - grad rho_1 . grad phi - rho_1 lap phi
  c.f1 = [](const Point& p, double t) {
    const Terms m = terms(p, t);
    const double e2 = m.e * m.e;
    const double lap_phi = m.x.dd + m.y.dd + m.z.dd;
    return -4 * (m.x.v + m.y.v) * m.e - 4 * (m.x.dd + m.y.dd) * m.e -
           4 * (m.x.d * m.x.d + m.y.d * m.y.d) * e2 - 4 * (m.x.v + m.y.v) * lap_phi * e2;
  };
  // f_2 = d_t rho_2 - lap rho_2 + grad rho_2 . grad phi + rho_2 lap phi
  c.f2 = [](const Point& p, double t) {
    const Terms m = terms(p, t);
    const double e2 = m.e * m.e;
    const double lap_phi = m.x.dd + m.y.dd + m.z.dd;
    return -(m.y.v + m.z.v) * m.e - (m.y.dd + m.z.dd) * m.e +
           (m.y.d * m.y.d + m.z.d * m.z.d) * e2 + (m.y.v + m.z.v) * lap_phi * e2;
  };
  c.f3 = [](const Point& p, double t) {
    const Terms m = terms(p, t);
    return -(m.x.dd + m.y.dd + m.z.dd) * m.e - 4 * (m.x.v + m.y.v) * m.e +
           (m.y.v + m.z.v) * m.e;
  };
  return c;
}

double ManufacturedCase::flux(int species, int axis, const Point& p, double t) const {
  const Terms m = terms(p, t);
  const std::array<double, 3> dphi{m.x.d * m.e, m.y.d * m.e, m.z.d * m.e};
  if (species == 0) {
    const std::array<double, 3> drho{4 * m.x.d * m.e, 4 * m.y.d * m.e, 0.0};
    return -(drho[axis] + rho1(p, t) * dphi[axis]);
  }
  const std::array<double, 3> drho{0.0, m.y.d * m.e, m.z.d * m.e};
  return -(drho[axis] - rho2(p, t) * dphi[axis]);
}

void check_no_flux_faces(const ManufacturedCase& mcase, const Grid& grid,
                         const BoundarySpec& boundaries, double t, double tolerance) {
  for (int j = 0; j < grid.dim(); ++j) {
    for (Side side : {Side::Minus, Side::Plus}) {
      if (boundaries.is_dirichlet(j, side)) continue;
      for (const FaceId& f : grid.boundary_faces(j, side)) {
        const Point x = grid.face_center(f);
        for (int i = 0; i < 2; ++i) {
          const double flux = mcase.flux(i, j, x, t);
          // The potential carries zero normal displacement on the same faces.
          const Terms m = terms(x, t);
          const double dphi = (j == 0 ? m.x.d : j == 1 ? m.y.d : m.z.d) * m.e;
          if (std::abs(flux) > tolerance || std::abs(dphi) > tolerance) {
            throw Error("manufactured solution has non-zero normal flux on a no-flux face");
          }
        }
      }
    }
  }
}

std::string to_string(TauRule rule) { return rule == TauRule::H ? "h" : "h^2"; }

Scenario build_scenario(const ManufacturedCase& mcase, int n, const SweepOptions& options) {
  Scenario s;
  s.grid = std::make_shared<const Grid>(3, std::vector<double>{1.0, 1.0, 1.0},
                                        std::vector<int>{n, n, n});
  SpeciesSpec a{"rho1", 1.0, constant_field(1.0), constant_field(0.0), mcase.rho1, mcase.f1};
  SpeciesSpec b{"rho2", -1.0, constant_field(1.0), constant_field(0.0), mcase.rho2, mcase.f2};
  s.species = {a, b};
  s.permittivity = constant_field(4.0 * std::numbers::pi);
  s.fixed_charge = mcase.f3;
  s.thermal_energy = 1.0;
  for (Side side : {Side::Minus, Side::Plus}) {
    s.boundaries.set_dirichlet(1, side, mcase.phi, {mcase.rho1, mcase.rho2});
  }
  s.order = options.order;
  s.mean = options.mean;
  s.limiter = options.limiter;
  s.data_time = options.data_time;
  const double h = 1.0 / n;
  s.tau = options.tau_rule == TauRule::H ? h : h * h;
  s.end_time = options.end_time;
  s.solver = options.solver;
  return s;
}

ErrorRow run_case(const ManufacturedCase& mcase, int n, const SweepOptions& options) {
  ErrorRow row;
  row.n = n;
  row.h = 1.0 / n;
  row.error.fill(std::numeric_limits<double>::quiet_NaN());
  row.order.fill(std::numeric_limits<double>::quiet_NaN());
  try {
    Scenario s = build_scenario(mcase, n, options);
    row.tau = s.tau;
    check_no_flux_faces(mcase, *s.grid, s.boundaries, 0.0);
    const Simulation sim(std::move(s));
    const RunResult r = sim.run();
    row.steps = r.reports.size();
    for (const auto& rep : r.reports) row.limiter_patches += rep.limiter_patches;
    const double t = r.state.time;
    row.error[0] = l1_error(r.state.densities[0], mcase.rho1, t);
    row.error[1] = l1_error(r.state.densities[1], mcase.rho2, t);
    row.error[2] = l1_error(r.state.phi, mcase.phi, t);
  } catch (const std::exception& e) {
    row.failure = e.what();
  }
  return row;
}

ErrorTable convergence_sweep(const std::vector<int>& grids, const SweepOptions& options) {
  for (std::size_t k = 1; k < grids.size(); ++k) {
    if (grids[k] <= grids[k - 1]) throw InvalidArgument("sweep grids must strictly refine");
  }
  if (!grids.empty() && grids.front() < 1) throw InvalidArgument("grid size must be positive");
  const ManufacturedCase mcase = unit_cube_case();
  ErrorTable table;
  table.options = options;
  for (std::size_t k = 0; k < grids.size(); ++k) {
    ErrorRow row = run_case(mcase, grids[k], options);
    if (k > 0) {
      const ErrorRow& prev = table.rows.back();
      const double ratio = std::log(static_cast<double>(grids[k]) / grids[k - 1]);
      for (int u = 0; u < 3; ++u) {
        row.order[u] = std::log(prev.error[u] / row.error[u]) / ratio;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void ErrorTable::write_csv(std::ostream& out) const {
  out << "grid,tau,rho1_error,rho1_order,rho2_error,rho2_order,phi_error,phi_order,"
         "limiter_patches,failure\n";
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (std::isnan(v)) return "-";
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
  };
  auto ord = [&](double v) -> std::string {
    if (std::isnan(v)) return "-";
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
  };
  for (const ErrorRow& r : rows) {
    out << r.n << 'x' << r.n << 'x' << r.n << ',' << num(r.tau);
    for (int u = 0; u < 3; ++u) out << ',' << num(r.error[u]) << ',' << ord(r.order[u]);
    out << ',' << r.limiter_patches << ',' << r.failure << '\n';
  }
}

bool is_preset(const std::string& name) {
  return name == "table1" || name == "table2" || name == "table3";
}

SweepOptions preset(const std::string& name) {
  SweepOptions o;
  if (name == "table1") {
    o.order = SchemeOrder::First;
    o.tau_rule = TauRule::H;
  } else if (name == "table2") {
    o.order = SchemeOrder::First;
    o.tau_rule = TauRule::H2;
  } else if (name == "table3") {
    o.order = SchemeOrder::Second;
    o.tau_rule = TauRule::H;
  } else {
    throw InvalidArgument("unknown mms preset '" + name + "'");
  }
  return o;
}

}  // namespace pnp::mms
