#include "pnp/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pnp/error.hpp"

namespace pnp {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

PoissonOperator::PoissonOperator(std::shared_ptr<const Grid> grid,
                                 const AnalyticField& permittivity,
                                 const BoundarySpec& boundaries)
    : grid_(std::move(grid)), boundaries_(boundaries) {
  const Grid& g = *grid_;
  const int d = g.dim();
  const std::size_t n = g.num_cells();
  gauge_ = boundaries.any_dirichlet(d) ? GaugeMode::DirichletPresent : GaugeMode::PureNeumann;

  eps_min_ = std::numeric_limits<double>::infinity();
  eps_max_ = 0.0;
  auto track = [&](double e) {
    if (!(e > 0.0)) throw InvalidArgument("permittivity must be positive everywhere");
    eps_min_ = std::min(eps_min_, e);
    eps_max_ = std::max(eps_max_, e);
  };
  for (std::size_t c = 0; c < n; ++c) track(permittivity(g.cell_center(c), 0.0));

  std::array<std::vector<double>, 3> face_eps;
  for (int j = 0; j < d; ++j) {
    face_eps[j] = sample_plus_faces(g, permittivity, j);
    for (std::size_t c = 0; c < n; ++c) {
      if (g.multi(c)[j] + 1 < g.count(j)) track(face_eps[j][c]);
    }
  }

  std::vector<double> diag(n, 0.0);
  for (int j = 0; j < d; ++j) {
    const double inv_h2 = 1.0 / (g.spacing(j) * g.spacing(j));
    for (Side side : {Side::Minus, Side::Plus}) {
      if (!boundaries.is_dirichlet(j, side)) continue;
      for (const FaceId& f : g.boundary_faces(j, side)) {
        const double e = face_value(g, permittivity, f);
        track(e);
        const double coeff = 2.0 * e * inv_h2;
        const std::size_t c = g.flat(f.cell);
        diag[c] += coeff;
        dirichlet_.push_back({c, f, coeff});
      }
    }
  }

  CsrBuilder builder(n, n * (2 * static_cast<std::size_t>(d) + 1));
  for (std::size_t c = 0; c < n; ++c) {
    const MultiIndex m = g.multi(c);
    double dsum = diag[c];
    // Neighbours in increasing flat order: minus faces from the slowest axis
    // down, then the cell, then plus faces.
    for (int j = d - 1; j >= 0; --j) {
      if (m[j] == 0) continue;
      const double w = face_eps[j][c - g.stride(j)] / (g.spacing(j) * g.spacing(j));
      builder.add(c - g.stride(j), -w);
      dsum += w;
    }
    for (int j = 0; j < d; ++j) {
      if (m[j] + 1 >= g.count(j)) continue;
      dsum += face_eps[j][c] / (g.spacing(j) * g.spacing(j));
    }
    builder.add(c, dsum);
    for (int j = 0; j < d; ++j) {
      if (m[j] + 1 >= g.count(j)) continue;
      builder.add(c + g.stride(j), -face_eps[j][c] / (g.spacing(j) * g.spacing(j)));
    }
    builder.end_row();
  }
  matrix_ = std::move(builder).finish();
}

std::vector<double> PoissonOperator::rhs(std::span<const double> charge, double t) const {
  const Grid& g = *grid_;
  const std::size_t n = g.num_cells();
  if (charge.size() != n) throw InvalidArgument("charge density size mismatch");
  std::vector<double> b(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (!std::isfinite(charge[c])) throw InvalidArgument("non-finite charge density");
    b[c] = kFourPi * charge[c];
  }
  for (const auto& df : dirichlet_) {
    const double phib = face_value(g, boundaries_.at(df.face.axis, df.face.side).potential,
                                   df.face, t);
    b[df.cell] += df.coeff * phib;
  }
  if (gauge_ == GaugeMode::PureNeumann) {
    double total = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      total += charge[c];
      scale = std::max(scale, std::abs(charge[c]));
    }
    // Uniform cells: sum |K| s = |K| sum s, tolerance sum |K| max|s| = |K| n max|s|.
    if (std::abs(total) > 1e-8 * static_cast<double>(n) * scale) {
      std::ostringstream msg;
      msg << "pure no-flux Poisson problem violates the compatibility condition for the "
             "source: total charge "
          << total * g.cell_volume() << " must vanish";
      throw InvalidArgument(msg.str());
    }
    const double mean = [&] {
      double s = 0.0;
      for (double v : b) s += v;
      return s / static_cast<double>(n);
    }();
    for (double& v : b) v -= mean;
  }
  return b;
}

PoissonSystem PoissonOperator::assemble(std::span<const double> charge, double t) const {
  return PoissonSystem{matrix_, rhs(charge, t), gauge_};
}

std::vector<double> charge_density(std::span<const double> fixed_charge,
                                   const std::vector<ScalarField>& densities,
                                   std::span<const double> charges) {
  if (densities.size() != charges.size()) {
    throw InvalidArgument("one charge per species required");
  }
  std::vector<double> s(fixed_charge.begin(), fixed_charge.end());
  for (std::size_t i = 0; i < densities.size(); ++i) {
    if (densities[i].size() != s.size()) throw InvalidArgument("density size mismatch");
    const double q = charges[i];
    if (q == 0.0) continue;
    for (std::size_t c = 0; c < s.size(); ++c) s[c] += q * densities[i][c];
  }
  return s;
}

PoissonSystem assemble_poisson(std::shared_ptr<const Grid> grid,
                               const AnalyticField& permittivity,
                               std::span<const double> fixed_charge,
                               const std::vector<ScalarField>& densities,
                               std::span<const double> charges, const BoundarySpec& boundaries,
                               double t) {
  const PoissonOperator op(std::move(grid), permittivity, boundaries);
  return op.assemble(charge_density(fixed_charge, densities, charges), t);
}

ScalarField solve_poisson(std::shared_ptr<const Grid> grid, const PoissonSystem& system,
                          const SolverConfig& config, std::span<const double> initial_guess,
                          int* iterations) {
  SolveResult r = solve(system.matrix, system.rhs, config, initial_guess);
  if (iterations != nullptr) *iterations = r.iterations;
  if (system.gauge == GaugeMode::PureNeumann && !r.x.empty()) {
    const double pin = r.x[0];
    for (double& v : r.x) v -= pin;
    r.x[0] = 0.0;
  }
  return ScalarField(std::move(grid), std::move(r.x));
}

}  // namespace pnp
