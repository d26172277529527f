#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/sparse.hpp"

namespace pnp {

/// Rule for e^{-psi} on a face from the two adjacent cell values.
enum class InterfaceMean { Harmonic, Geometric, Algebraic };

std::string to_string(InterfaceMean mean);

/// Face value of e^{-psi} from psi on both sides.
///   harmonic:  2 e^{-l-r} / (e^{-l} + e^{-r})
///   geometric: e^{-(l+r)/2}
///   algebraic: (e^{-l} + e^{-r}) / 2
/// The common factor e^{-min(l, r)} is pulled out first, so the result is
/// finite whenever the mean itself is representable.
double slotboom_weight(double psi_left, double psi_right, InterfaceMean mean);

/// psi_i = (q_i phi + mu_i) / k_BT, cellwise.
std::vector<double> slotboom_potential(std::span<const double> phi, double charge,
                                       std::span<const double> chemical_potential,
                                       double thermal_energy);

/// Linear system for one species in the Slotboom unknown G = rho e^{psi - s},
/// where s = max_alpha psi_alpha keeps every exponential bounded. Rows are
///
///   e^{-(psi_a - s)} G_a + tau sum_faces w_f D_f / h^2 (G_a - G_nb)
///     + tau sum_Dirichlet 2 D_f e^{-(psi^b - s)} / h^2 G_a
///   = rho^n_a + tau sum_Dirichlet 2 D_f rho^b / h^2 + tau f_a
///
/// with w_f the interface mean of e^{-(psi - s)}. The matrix is symmetric
/// and strictly diagonally dominant with positive diagonal.
struct DensitySystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::vector<double> cell_weight;  // e^{-(psi_a - s)}; rho = G * cell_weight
  double shift = 0.0;

  std::vector<double> recover(std::span<const double> g) const;
  /// Slotboom unknown matching a density, for warm starts.
  std::vector<double> slotboom(std::span<const double> rho) const;
};

/// Per-step inputs that change with time.
struct DensityStepData {
  std::span<const double> density;   // rho^n, cellwise
  std::span<const double> psi;       // psi used for the step (psi^n or extrapolant)
  /// psi^b on a Dirichlet face.
  std::function<double(const FaceId&)> boundary_psi;
  double tau = 0.0;
  double trace_time = 0.0;           // time at which rho^b is evaluated
  double source_time = 0.0;          // time at which the forcing f_i is evaluated
  bool allow_negative_density = false;
};

/// Static per-species data (face diffusion, cell chemical potential) cached
/// once per grid; assembles the step system.
class TransportOperator {
 public:
  TransportOperator(std::shared_ptr<const Grid> grid, const SpeciesSpec& species,
                    std::size_t species_index, const BoundarySpec& boundaries,
                    double thermal_energy, InterfaceMean mean);

  const Grid& grid() const noexcept { return *grid_; }
  const SpeciesSpec& species() const noexcept { return species_; }
  std::span<const double> chemical_potential() const noexcept { return mu_; }
  /// D at the plus face of each cell along `axis` (last layer unused).
  std::span<const double> face_diffusion(int axis) const { return face_d_[axis]; }
  double max_diffusion() const noexcept { return d_max_; }
  InterfaceMean mean() const noexcept { return mean_; }

  std::vector<double> psi(std::span<const double> phi) const;
  /// psi^b on a Dirichlet face from the trace phi^b(x_face, t).
  double boundary_psi(const FaceId& face, double t) const;

  DensitySystem assemble(const DensityStepData& step) const;

  /// Sum over Dirichlet faces of 2 D e^{-(psi^b - s)} / h^2 per cell plus the
  /// interior weights; used by the small-step positivity bound.
  std::vector<double> off_diagonal_sum(std::span<const double> psi,
                                       const std::function<double(const FaceId&)>& boundary_psi,
                                       double shift) const;

 private:
  std::shared_ptr<const Grid> grid_;
  SpeciesSpec species_;
  std::size_t index_;
  BoundarySpec boundaries_;
  double thermal_energy_;
  InterfaceMean mean_;
  std::vector<double> mu_;
  std::array<std::vector<double>, 3> face_d_;
  double d_max_ = 0.0;
};

/// One-shot assembly of the first-order step for species `species_index`:
/// psi^b from phi^b(., t_n), traces rho^b and forcing at `data_time`.
DensitySystem assemble_density_step(std::shared_ptr<const Grid> grid, const SpeciesSpec& species,
                                    std::size_t species_index, std::span<const double> density,
                                    std::span<const double> psi, const BoundarySpec& boundaries,
                                    double tau, double t_n, double thermal_energy,
                                    InterfaceMean mean, double data_time);

}  // namespace pnp
