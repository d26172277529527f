#include "pnp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pnp/error.hpp"

namespace pnp {

std::string to_string(InterfaceMean mean) {
  switch (mean) {
    case InterfaceMean::Harmonic: return "harmonic";
    case InterfaceMean::Geometric: return "geometric";
    case InterfaceMean::Algebraic: return "algebraic";
  }
  return "harmonic";
}

double slotboom_weight(double psi_left, double psi_right, InterfaceMean mean) {
  if (!std::isfinite(psi_left) || !std::isfinite(psi_right)) {
    throw InvalidArgument("slotboom_weight: non-finite potential");
  }
  if (mean == InterfaceMean::Geometric) return std::exp(-0.5 * (psi_left + psi_right));
  const double lo = std::min(psi_left, psi_right);
  const double small = std::exp(-(std::max(psi_left, psi_right) - lo));  // in (0, 1]
  const double scale = std::exp(-lo);
  if (mean == InterfaceMean::Harmonic) return scale * (2.0 * small / (1.0 + small));
  return scale * (0.5 * (1.0 + small));
}

std::vector<double> slotboom_potential(std::span<const double> phi, double charge,
                                       std::span<const double> chemical_potential,
                                       double thermal_energy) {
  std::vector<double> psi(phi.size());
  for (std::size_t c = 0; c < phi.size(); ++c) {
    psi[c] = (charge * phi[c] + chemical_potential[c]) / thermal_energy;
  }
  return psi;
}

std::vector<double> DensitySystem::recover(std::span<const double> g) const {
  std::vector<double> rho(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) rho[c] = g[c] * cell_weight[c];
  return rho;
}

std::vector<double> DensitySystem::slotboom(std::span<const double> rho) const {
  std::vector<double> g(rho.size());
  for (std::size_t c = 0; c < rho.size(); ++c) g[c] = rho[c] / cell_weight[c];
  return g;
}

TransportOperator::TransportOperator(std::shared_ptr<const Grid> grid,
                                     const SpeciesSpec& species, std::size_t species_index,
                                     const BoundarySpec& boundaries, double thermal_energy,
                                     InterfaceMean mean)
    : grid_(std::move(grid)),
      species_(species),
      index_(species_index),
      boundaries_(boundaries),
      thermal_energy_(thermal_energy),
      mean_(mean) {
  const Grid& g = *grid_;
  if (!(thermal_energy > 0.0)) throw InvalidArgument("k_BT must be positive");
  const ScalarField mu = sample_initial(grid_, species.chemical_potential);
  mu_.assign(mu.values().begin(), mu.values().end());
  for (int j = 0; j < g.dim(); ++j) {
    face_d_[j] = sample_plus_faces(g, species.diffusion, j);
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      const double d = face_d_[j][c];
      if (!(d > 0.0)) {
        throw InvalidArgument("diffusion coefficient of species '" + species.name +
                              "' must be positive");
      }
      d_max_ = std::max(d_max_, d);
    }
    for (Side side : {Side::Minus, Side::Plus}) {
      for (const FaceId& f : g.boundary_faces(j, side)) {
        const double d = face_value(g, species.diffusion, f);
        if (!(d > 0.0)) {
          throw InvalidArgument("diffusion coefficient of species '" + species.name +
                                "' must be positive");
        }
        d_max_ = std::max(d_max_, d);
      }
    }
  }
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    if (!(species.diffusion(g.cell_center(c), 0.0) > 0.0)) {
      throw InvalidArgument("diffusion coefficient of species '" + species.name +
                            "' must be positive");
    }
  }
}

std::vector<double> TransportOperator::psi(std::span<const double> phi) const {
  return slotboom_potential(phi, species_.charge, mu_, thermal_energy_);
}

double TransportOperator::boundary_psi(const FaceId& face, double t) const {
  const auto& bc = boundaries_.at(face.axis, face.side);
  const double phib = face_value(*grid_, bc.potential, face, t);
  const double mub = face_value(*grid_, species_.chemical_potential, face, t);
  return (species_.charge * phib + mub) / thermal_energy_;
}

namespace {

double max_of(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

DensitySystem TransportOperator::assemble(const DensityStepData& step) const {
  const Grid& g = *grid_;
  const int d = g.dim();
  const std::size_t n = g.num_cells();
  if (step.density.size() != n || step.psi.size() != n) {
    throw InvalidArgument("density step: field size mismatch");
  }
  if (!(step.tau >= 0.0)) throw InvalidArgument("time step must be non-negative");

  DensitySystem sys;
  sys.shift = max_of(step.psi);
  if (!std::isfinite(sys.shift)) throw InvalidArgument("non-finite potential in density step");
  sys.cell_weight.resize(n);
  sys.rhs.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double rho = step.density[c];
    if (!std::isfinite(rho) || (!step.allow_negative_density && rho < 0.0)) {
      std::ostringstream msg;
      msg << "density step for species '" << species_.name << "': rho^n = " << rho
          << " at cell " << c << " violates rho^n >= 0";
      throw InvalidArgument(msg.str());
    }
    sys.cell_weight[c] = std::exp(-(step.psi[c] - sys.shift));
    sys.rhs[c] = rho;
  }

  if (species_.source) {
    for (std::size_t c = 0; c < n; ++c) {
      sys.rhs[c] += step.tau * species_.source(g.cell_center(c), step.source_time);
    }
  }

  std::vector<double> diag(sys.cell_weight);
  for (int j = 0; j < d; ++j) {
    const double inv_h2 = 1.0 / (g.spacing(j) * g.spacing(j));
    for (Side side : {Side::Minus, Side::Plus}) {
      if (!boundaries_.is_dirichlet(j, side)) continue;
      const auto& bc = boundaries_.at(j, side);
      for (const FaceId& f : g.boundary_faces(j, side)) {
        const std::size_t c = g.flat(f.cell);
        const double dface = face_value(g, species_.diffusion, f);
        const double trace = face_value(g, bc.densities.at(index_), f, step.trace_time);
        if (trace < 0.0) {
          throw InvalidArgument("Dirichlet density trace of species '" + species_.name +
                                "' is negative");
        }
        const double wb = std::exp(-(step.boundary_psi(f) - sys.shift));
        diag[c] += step.tau * 2.0 * dface * wb * inv_h2;
        sys.rhs[c] += step.tau * 2.0 * dface * trace * inv_h2;
      }
    }
  }

  // Interior coupling tau D_f w_f / h^2 at the plus face of each cell.
  std::array<std::vector<double>, 3> coupling;
  for (int j = 0; j < d; ++j) {
    coupling[j].assign(n, 0.0);
    const double scale = step.tau / (g.spacing(j) * g.spacing(j));
    const std::size_t s = g.stride(j);
    for (std::size_t c = 0; c < n; ++c) {
      if (g.multi(c)[j] + 1 >= g.count(j)) continue;
      const double w = slotboom_weight(step.psi[c] - sys.shift, step.psi[c + s] - sys.shift, mean_);
      const double k = scale * face_d_[j][c] * w;
      coupling[j][c] = k;
      diag[c] += k;
      diag[c + s] += k;
    }
  }

  for (std::size_t c = 0; c < n; ++c) {
    if (!std::isfinite(diag[c]) || !std::isfinite(sys.rhs[c])) {
      std::ostringstream msg;
      msg << "density step for species '" << species_.name << "': e^{-psi} overflows at cell "
          << c << "; potential differences (cells and Dirichlet walls) beyond ~700 k_BT are "
             "not representable";
      throw Error(msg.str());
    }
  }

  CsrBuilder builder(n, n * (2 * static_cast<std::size_t>(d) + 1));
  for (std::size_t c = 0; c < n; ++c) {
    const MultiIndex m = g.multi(c);
    for (int j = d - 1; j >= 0; --j) {
      if (m[j] > 0) builder.add(c - g.stride(j), -coupling[j][c - g.stride(j)]);
    }
    builder.add(c, diag[c]);
    for (int j = 0; j < d; ++j) {
      if (m[j] + 1 < g.count(j)) builder.add(c + g.stride(j), -coupling[j][c]);
    }
    builder.end_row();
  }
  sys.matrix = std::move(builder).finish();
  return sys;
}

std::vector<double> TransportOperator::off_diagonal_sum(
    std::span<const double> psi, const std::function<double(const FaceId&)>& boundary_psi,
    double shift) const {
  const Grid& g = *grid_;
  const std::size_t n = g.num_cells();
  std::vector<double> sum(n, 0.0);
  for (int j = 0; j < g.dim(); ++j) {
    const double inv_h2 = 1.0 / (g.spacing(j) * g.spacing(j));
    const std::size_t s = g.stride(j);
    for (std::size_t c = 0; c < n; ++c) {
      if (g.multi(c)[j] + 1 >= g.count(j)) continue;
      const double k = face_d_[j][c] * slotboom_weight(psi[c] - shift, psi[c + s] - shift, mean_) * inv_h2;
      sum[c] += k;
      sum[c + s] += k;
    }
    for (Side side : {Side::Minus, Side::Plus}) {
      if (!boundaries_.is_dirichlet(j, side)) continue;
      for (const FaceId& f : g.boundary_faces(j, side)) {
        const double dface = face_value(g, species_.diffusion, f);
        sum[g.flat(f.cell)] += 2.0 * dface * std::exp(-(boundary_psi(f) - shift)) * inv_h2;
      }
    }
  }
  return sum;
}

DensitySystem assemble_density_step(std::shared_ptr<const Grid> grid, const SpeciesSpec& species,
                                    std::size_t species_index, std::span<const double> density,
                                    std::span<const double> psi, const BoundarySpec& boundaries,
                                    double tau, double t_n, double thermal_energy,
                                    InterfaceMean mean, double data_time) {
  const TransportOperator op(std::move(grid), species, species_index, boundaries,
                             thermal_energy, mean);
  DensityStepData step;
  step.density = density;
  step.psi = psi;
  step.boundary_psi = [&](const FaceId& f) { return op.boundary_psi(f, t_n); };
  step.tau = tau;
  step.trace_time = data_time;
  step.source_time = data_time;
  return op.assemble(step);
}

}  // namespace pnp
