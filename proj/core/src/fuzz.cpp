#include "pnp/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pnp/marching.hpp"

namespace pnp {

namespace {

// Piecewise-constant lookup of per-cell values; matches midpoint sampling.
AnalyticField cell_table(std::shared_ptr<const Grid> grid, std::vector<double> values) {
  return [grid, v = std::move(values)](const Point& p, double) {
    std::array<int, 3> k{0, 0, 0};
    for (int j = 0; j < grid->dim(); ++j) {
      k[j] = std::clamp(static_cast<int>(std::floor(p[j] / grid->spacing(j))), 0,
                        grid->count(j) - 1);
    }
    return v[grid->flat(k)];
  };
}

// Sum of a few random Fourier modes.
AnalyticField smooth(std::mt19937_64& rng, double amplitude, double offset) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> mode(0, 3);
  struct Mode {
    double a;
    std::array<int, 3> k;
    double phase;
  };
  std::vector<Mode> modes(4);
  for (auto& m : modes) m = {amplitude * u(rng), {mode(rng), mode(rng), mode(rng)}, 3.0 * u(rng)};
  return [modes, offset](const Point& p, double t) {
    double s = offset;
    for (const auto& m : modes) {
      s += m.a * std::cos(std::numbers::pi * (m.k[0] * p[0] + m.k[1] * p[1] + m.k[2] * p[2]) +
                          m.phase + 0.1 * t);
    }
    return s;
  };
}

}  // namespace

Scenario random_scenario(std::mt19937_64& rng, int max_cells) {
  std::uniform_int_distribution<int> dim_d(1, 3);
  std::uniform_int_distribution<int> cells_d(2, std::max(2, max_cells));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double taus[] = {1e-3, 1.0, 1e3};
  const double charges[] = {-2.0, -1.0, 1.0, 2.0};

  Scenario s;
  const int dim = dim_d(rng);
  std::vector<double> lengths;
  std::vector<int> counts;
  for (int j = 0; j < dim; ++j) {
    lengths.push_back(0.5 + u01(rng));
    counts.push_back(cells_d(rng));
  }
  s.grid = std::make_shared<const Grid>(dim, lengths, counts);
  const std::size_t n = s.grid->num_cells();

  const int n_species = 1 + static_cast<int>(u01(rng) * 3.0);
  for (int i = 0; i < n_species; ++i) {
    std::vector<double> rho(n);
    const double zero_fraction = u01(rng) * 0.7;
    for (double& r : rho) r = u01(rng) < zero_fraction ? 0.0 : std::pow(10.0, 3.0 * u01(rng) - 2.0);
    SpeciesSpec sp;
    sp.name = "s" + std::to_string(i);
    sp.charge = charges[static_cast<int>(u01(rng) * 4.0) % 4];
    const AnalyticField d = smooth(rng, 0.4, 1.0);
    sp.diffusion = [d](const Point& p, double t) { return std::exp(d(p, t)); };
    sp.chemical_potential = smooth(rng, 10.0 * u01(rng), 0.0);
    sp.initial = cell_table(s.grid, std::move(rho));
    s.species.push_back(std::move(sp));
  }
  const AnalyticField e = smooth(rng, 0.3, 0.0);
  s.permittivity = [e](const Point& p, double t) {
    return 4.0 * std::numbers::pi * std::exp(e(p, t));
  };
  s.fixed_charge = smooth(rng, 5.0 * u01(rng), 0.0);
  s.thermal_energy = 0.5 + u01(rng);

  bool any = false;
  for (int j = 0; j < dim; ++j) {
    for (Side side : {Side::Minus, Side::Plus}) {
      if (u01(rng) < 0.3) {
        std::vector<AnalyticField> traces;
        for (int i = 0; i < n_species; ++i) {
          const double c = u01(rng) < 0.3 ? 0.0 : 2.0 * u01(rng);
          traces.push_back(constant_field(c));
        }
        s.boundaries.set_dirichlet(j, side, smooth(rng, 3.0, 0.0), std::move(traces));
        any = true;
      }
    }
  }
  s.neutralize_fixed_charge = !any;
  s.order = SchemeOrder::First;
  s.mean = static_cast<InterfaceMean>(static_cast<int>(u01(rng) * 3.0) % 3);
  s.tau = taus[static_cast<int>(u01(rng) * 3.0) % 3];
  s.end_time = 3.0 * s.tau;
  s.solver.tolerance = 1e-13;
  return s;
}

namespace {
constexpr double kMaxPsiSpread = 250.0;
}

PositivityCheck check_first_order_positivity(const Scenario& scenario, std::size_t steps) {
  const Simulation sim(scenario);
  State state = sim.init_state();
  PositivityCheck out;
  out.worst_ratio = INFINITY;
  const Grid& g = sim.grid();
  std::vector<FaceId> dirichlet_faces;
  for (int j = 0; j < g.dim(); ++j) {
    for (Side side : {Side::Minus, Side::Plus}) {
      if (!scenario.boundaries.is_dirichlet(j, side)) continue;
      for (const FaceId& f : g.boundary_faces(j, side)) dirichlet_faces.push_back(f);
    }
  }
  for (std::size_t k = 0; k < steps; ++k) {
    if (k > 0) {
      double spread = 0.0;
      for (std::size_t i = 0; i < state.psi.size(); ++i) {
        const auto [lo_it, hi_it] = std::minmax_element(state.psi[i].begin(), state.psi[i].end());
        double lo = *lo_it, hi = *hi_it;
        for (const FaceId& f : dirichlet_faces) {
          const double b = sim.transport(i).boundary_psi(f, state.time);
          lo = std::min(lo, b);
          hi = std::max(hi, b);
        }
        spread = std::max(spread, hi - lo);
      }
      if (spread > kMaxPsiSpread) {
        out.truncated = true;
        break;
      }
    }
    sim.step_first_order(state, scenario.tau);
    ++out.steps;
    for (const auto& r : state.densities) {
      const double mx = r.max();
      if (mx > 0.0) out.worst_ratio = std::min(out.worst_ratio, r.min() / mx);
    }
  }
  return out;
}

}  // namespace pnp
