#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/sparse.hpp"

namespace pnp {

enum class GaugeMode { DirichletPresent, PureNeumann };

/// Discrete form of -div(eps grad phi) = 4 pi (f + sum_i q_i rho_i).
///
/// Row alpha reads  -sum_j (Phi_{alpha+e_j/2} - Phi_{alpha-e_j/2}) / h_j = 4 pi s_alpha
/// with interior flux eps(x_face) (phi_nb - phi_alpha) / h_j, a half-cell
/// flux 2 eps (phi^b - phi_alpha) / h_j on Dirichlet faces and zero flux on
/// no-flux faces. Dirichlet data live in `rhs`.
struct PoissonSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  GaugeMode gauge = GaugeMode::DirichletPresent;
};

/// Caches the (time-independent) operator for a grid, permittivity and
/// boundary partition; only the right-hand side changes between steps.
class PoissonOperator {
 public:
  PoissonOperator(std::shared_ptr<const Grid> grid, const AnalyticField& permittivity,
                  const BoundarySpec& boundaries);

  GaugeMode gauge() const noexcept { return gauge_; }
  const CsrMatrix& matrix() const noexcept { return matrix_; }
  const Grid& grid() const noexcept { return *grid_; }

  /// Smallest and largest permittivity over cell and face centers.
  double min_permittivity() const noexcept { return eps_min_; }
  double max_permittivity() const noexcept { return eps_max_; }

  /// Right-hand side for the cell charge density `charge` (= f + sum q rho)
  /// with Dirichlet traces phi^b(., t). In pure-Neumann mode checks the
  /// compatibility condition and returns the mean-free projection.
  std::vector<double> rhs(std::span<const double> charge, double t) const;

  PoissonSystem assemble(std::span<const double> charge, double t) const;

 private:
  std::shared_ptr<const Grid> grid_;
  BoundarySpec boundaries_;
  GaugeMode gauge_;
  CsrMatrix matrix_;
  // Per Dirichlet face: adjacent cell, face, coefficient 2 eps / h^2.
  struct DirichletFace {
    std::size_t cell;
    FaceId face;
    double coeff;
  };
  std::vector<DirichletFace> dirichlet_;
  double eps_min_ = 0.0;
  double eps_max_ = 0.0;
};

/// Cellwise f + sum_i q_i rho_i.
std::vector<double> charge_density(std::span<const double> fixed_charge,
                                   const std::vector<ScalarField>& densities,
                                   std::span<const double> charges);

/// One-shot assembly; see PoissonOperator.
PoissonSystem assemble_poisson(std::shared_ptr<const Grid> grid,
                               const AnalyticField& permittivity,
                               std::span<const double> fixed_charge,
                               const std::vector<ScalarField>& densities,
                               std::span<const double> charges, const BoundarySpec& boundaries,
                               double t);

/// Solves the system. Pure-Neumann systems are solved in the mean-free
/// subspace and then shifted so that the first cell holds exactly 0.
ScalarField solve_poisson(std::shared_ptr<const Grid> grid, const PoissonSystem& system,
                          const SolverConfig& config, std::span<const double> initial_guess = {},
                          int* iterations = nullptr);

}  // namespace pnp
